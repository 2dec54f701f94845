use std::f64::consts::PI;

use num_complex::Complex64;

use super::path::{PathSpec, Segment};
use super::track::{start_roots, track_roots, Permutation, RootTrace};
use crate::polyalg::{polyfit_complex, BiPoly, UniPoly};
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

const TRACK_TOL: f64 = 1e-12;
/// Fit residual threshold relative to `1 + max |w|`.
const POLY_REL_TOL: f64 = 1e-8;

/// Result of continuing a germ around the singular set.
#[derive(Debug, Clone, PartialEq)]
pub enum BranchOutcome {
    /// The branch is single-valued and matches a polynomial of degree `<= deg_z Q`.
    Polynomial {
        poly: UniPoly,
        residual: f64,
        degree_used: usize,
        samples: usize,
    },
    /// Continuation along `stage` does not return the germ to itself.
    Ramified {
        stage: &'static str,
        permutation: Permutation,
    },
    /// Single-valued on the tested contours but not polynomial within tolerance.
    NotPolynomial { residual: f64, threshold: f64 },
}

/// Closed contours through `z0`: out to `r`, around the upper (resp. lower)
/// half circle to `-r`, and back to `z0`.
pub fn upper_lower_contours(z0: Complex64, r: f64) -> Result<(PathSpec, PathSpec)> {
    if !(r > z0.norm()) {
        return Err(Error::invalid("contour radius must exceed |z0|"));
    }
    let right = Complex64::new(r, 0.0);
    let left = Complex64::new(-r, 0.0);
    let mk = |sweep: f64| {
        PathSpec::new(
            vec![
                Segment::Line { from: z0, to: right },
                Segment::Arc {
                    center: Complex64::new(0.0, 0.0),
                    radius: r,
                    start: 0.0,
                    sweep,
                },
                Segment::Line { from: left, to: z0 },
            ],
            true,
        )
    };
    Ok((mk(PI)?, mk(-PI)?))
}

/// Radial segment from `z0` to the circle `|z| = r`, once around it
/// counter-clockwise, and back.
fn outer_loop(z0: Complex64, r: f64) -> Result<PathSpec> {
    let ang = if z0.norm() > 0.0 { z0.arg() } else { 0.0 };
    let rim = Complex64::from_polar(r, ang);
    PathSpec::new(
        vec![
            Segment::Line { from: z0, to: rim },
            Segment::Arc {
                center: Complex64::new(0.0, 0.0),
                radius: r,
                start: ang,
                sweep: 2.0 * PI,
            },
            Segment::Line { from: rim, to: z0 },
        ],
        true,
    )
}

fn germ_index(q: &BiPoly, z0: Complex64, w0: Complex64) -> Result<usize> {
    let scale = q.scale_at(z0, w0).max(f64::MIN_POSITIVE);
    if !(q.eval(z0, w0).norm() <= 1e-8 * scale) {
        return Err(Error::invalid(format!("({z0}, {w0}) is not on Q = 0")));
    }
    let rs = start_roots(q, z0, TRACK_TOL)?;
    Ok(rs
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - w0).norm().total_cmp(&(b.1 - w0).norm()))
        .map(|(i, _)| i)
        .expect("deg_w >= 1"))
}

fn fixes(trace: &RootTrace, idx: usize) -> Option<Permutation> {
    let p = trace.permutation.clone().expect("closed path");
    (p.0[idx] != idx).then_some(p)
}

/// Continues the germ `w(z0) = w0` around the singular set and, if it
/// comes back single-valued, fits it by a polynomial of degree `<= deg_z Q`.
///
/// `r` is an enclosing radius of the singular set; the contours use
/// `max(r, 1.25 |z0|)`.
pub fn entire_branch_to_polynomial(q: &BiPoly, z0: Complex64, w0: Complex64, r: f64) -> Result<BranchOutcome> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid("enclosing radius must be positive"));
    }
    let idx = germ_index(q, z0, w0)?;
    let rc = r.max(1.25 * z0.norm());

    let outer = track_roots(q, &outer_loop(z0, rc)?, TRACK_TOL)?;
    if let Some(p) = fixes(&outer, idx) {
        return Ok(BranchOutcome::Ramified {
            stage: "outer circle",
            permutation: p,
        });
    }
    let (up, down) = upper_lower_contours(z0, rc)?;
    let mut zs = Vec::new();
    let mut ws = Vec::new();
    for (stage, path) in [("upper contour", &up), ("lower contour", &down)] {
        let tr = track_roots(q, path, TRACK_TOL)?;
        if let Some(p) = fixes(&tr, idx) {
            return Ok(BranchOutcome::Ramified {
                stage,
                permutation: p,
            });
        }
        for st in &tr.steps {
            zs.push(st.z);
            ws.push(st.roots[idx]);
        }
    }
    let fit = polyfit_complex(&zs, &ws, q.deg_z())?;
    let threshold = POLY_REL_TOL * (1.0 + ws.iter().map(|w| w.norm()).fold(0.0, f64::max));
    if fit.residual <= threshold {
        Ok(BranchOutcome::Polynomial {
            poly: fit.poly,
            residual: fit.residual,
            degree_used: fit.degree_used,
            samples: zs.len(),
        })
    } else {
        Ok(BranchOutcome::NotPolynomial {
            residual: fit.residual,
            threshold,
        })
    }
}

/// `∮ w(z) z^m dz` for `m = 0..=m_max` along a closed path, following the
/// branch through `(z0, w0)` (`z0` must be the path's basepoint).
pub fn contour_moments(q: &BiPoly, w0: Complex64, path: &PathSpec, m_max: usize) -> Result<Vec<Complex64>> {
    if !path.is_closed() {
        return Err(Error::invalid("moments need a closed path"));
    }
    let z0 = path.basepoint();
    let idx = germ_index(q, z0, w0)?;
    let tr = track_roots(q, path, TRACK_TOL)?;
    let gl = GaussLegendre::new(8);
    let mut out = vec![Complex64::new(0.0, 0.0); m_max + 1];
    for pair in tr.steps.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let (wa, wb) = (a.roots[idx], b.roots[idx]);
        let span = b.arc_length - a.arc_length;
        for (s, wt) in gl.on_interval(a.arc_length, b.arc_length) {
            let (z, dz) = path.at_arclength(s);
            let f = (s - a.arc_length) / span;
            let mut w = wa + (wb - wa) * f;
            for _ in 0..8 {
                let (v, v_w, _) = q.eval_with_partials(z, w);
                let dw = v / v_w;
                w -= dw;
                if dw.norm() <= 1e-15 * (1.0 + w.norm()) {
                    break;
                }
            }
            let mut zp = Complex64::new(1.0, 0.0);
            for o in out.iter_mut() {
                *o += w * zp * dz * wt;
                zp *= z;
            }
        }
    }
    Ok(out)
}
