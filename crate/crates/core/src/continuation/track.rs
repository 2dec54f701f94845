use std::fmt;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::path::PathSpec;
use super::singular_points;
use crate::polyalg::{roots, BiPoly};
use crate::{Error, Result};

/// Steps per path length at the start (and the largest step allowed).
pub const INITIAL_STEPS: f64 = 256.0;
/// Smallest step as a fraction of the path length.
pub const MIN_STEP_FRACTION: f64 = 1.0 / (1u64 << 20) as f64;
/// Root separation floor, relative to the root scale.
pub const SEP_MIN_REL: f64 = 1e-6;
/// Required distance from the singular set, relative to the enclosing radius.
pub const SINGULAR_MARGIN_REL: f64 = 1e-3;

/// One accepted continuation step.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub arc_length: f64,
    pub z: Complex64,
    pub roots: Vec<Complex64>,
}

/// Permutation of root indices, `sigma[j]` zero-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(pub Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Cycles of length >= 2, 1-based, each starting at its smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut j = s;
            while !seen[j] {
                seen[j] = true;
                cyc.push(j + 1);
                j = self.0[j];
            }
            if cyc.len() > 1 {
                out.push(cyc);
            }
        }
        out
    }

    /// Sorted cycle lengths including fixed points.
    pub fn cycle_type(&self) -> Vec<usize> {
        let moved: usize = self.cycles().iter().map(Vec::len).sum();
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.extend(std::iter::repeat(1).take(self.0.len() - moved));
        t.sort_unstable();
        t
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(usize::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

/// Continuation record of all roots `w_j(z)` along a path.
#[derive(Debug, Clone, PartialEq)]
pub struct RootTrace {
    pub steps: Vec<TraceStep>,
    /// For closed paths: `end_root[sigma(j)] ~ start_root[j]`.
    pub permutation: Option<Permutation>,
}

impl RootTrace {
    pub fn start_roots(&self) -> &[Complex64] {
        &self.steps[0].roots
    }

    pub fn end_roots(&self) -> &[Complex64] {
        &self.steps[self.steps.len() - 1].roots
    }

    /// CSV with columns `step,z_re,z_im,root_index,w_re,w_im` (root index 1-based).
    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,z_re,z_im,root_index,w_re,w_im\n");
        for (i, st) in self.steps.iter().enumerate() {
            for (j, w) in st.roots.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{i},{:.16e},{:.16e},{},{:.16e},{:.16e}",
                    st.z.re,
                    st.z.im,
                    j + 1,
                    w.re,
                    w.im
                );
            }
        }
        s
    }
}

/// Backward-error residual `|Q(z, w)| / Σ |q_ik| |z|^k |w|^i`.
fn rel_residual(q: &BiPoly, z: Complex64, w: Complex64) -> f64 {
    q.eval(z, w).norm() / q.scale_at(z, w).max(f64::MIN_POSITIVE)
}

fn newton(q: &BiPoly, z: Complex64, mut w: Complex64, tol: f64) -> Option<Complex64> {
    for _ in 0..12 {
        let (v, v_w, _) = q.eval_with_partials(z, w);
        if v_w.norm() == 0.0 {
            return None;
        }
        let dw = v / v_w;
        w -= dw;
        if !(w.re.is_finite() && w.im.is_finite()) {
            return None;
        }
        if dw.norm() <= 1e-15 * (1.0 + w.norm()) {
            break;
        }
    }
    (rel_residual(q, z, w) <= tol).then_some(w)
}

fn min_separation(ws: &[Complex64]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..ws.len() {
        for j in i + 1..ws.len() {
            m = m.min((ws[i] - ws[j]).norm());
        }
    }
    m
}

fn root_scale(ws: &[Complex64]) -> f64 {
    ws.iter().map(|w| w.norm()).fold(1.0, f64::max)
}

enum StepFailure {
    Corrector,
    Collision,
}

/// One predictor–corrector step from `(z0, ws)` to `z1`; every corrected root
/// must have its own predecessor as nearest neighbor.
fn try_step(
    q: &BiPoly,
    z0: Complex64,
    z1: Complex64,
    ws: &[Complex64],
    tol: f64,
    sep_min: f64,
) -> std::result::Result<Vec<Complex64>, StepFailure> {
    let dz = z1 - z0;
    let mut out = Vec::with_capacity(ws.len());
    for &w in ws {
        let (_, q_w, q_z) = q.eval_with_partials(z0, w);
        if q_w.norm() == 0.0 {
            return Err(StepFailure::Corrector);
        }
        let pred = w - q_z / q_w * dz;
        out.push(newton(q, z1, pred, tol).ok_or(StepFailure::Corrector)?);
    }
    let sep = min_separation(&out);
    if sep < sep_min {
        return Err(StepFailure::Collision);
    }
    // nearest-neighbour pairing must reproduce the tracked order, with a
    // displacement well below the gap to the other roots
    let prev_sep = min_separation(ws);
    for (i, w) in out.iter().enumerate() {
        let moved = (w - ws[i]).norm();
        if ws.len() > 1 && moved > 0.3 * prev_sep.min(sep) {
            return Err(StepFailure::Corrector);
        }
        for (j, p) in ws.iter().enumerate() {
            if j != i && (w - p).norm() <= moved {
                return Err(StepFailure::Corrector);
            }
        }
    }
    Ok(out)
}

/// Initial roots of `Q(z0, ·)`, Newton-polished.
pub(crate) fn start_roots(q: &BiPoly, z0: Complex64, tol: f64) -> Result<Vec<Complex64>> {
    let f = q.at_z(z0);
    if f.degree() != q.deg_w() {
        return Err(Error::invalid(format!(
            "leading coefficient in w vanishes at the basepoint {z0}"
        )));
    }
    let rs = roots(&f, 1e-12)?;
    rs.into_iter()
        .map(|w| newton(q, z0, w, tol).ok_or_else(|| Error::numeric("initial roots", rel_residual(q, z0, w))))
        .collect()
}

/// Continues all `N` roots of `Q(z, ·) = 0` along `path`.
pub fn track_roots(q: &BiPoly, path: &PathSpec, tol_track: f64) -> Result<RootTrace> {
    if !(tol_track > 0.0 && tol_track < 1e-2) {
        return Err(Error::invalid("tol_track must be in (0, 1e-2)"));
    }
    let sing = singular_points(q)?;
    let margin = SINGULAR_MARGIN_REL * sing.enclosing_radius;
    for &p in &sing.points {
        let d = path.distance_to(p);
        if d < margin {
            return Err(Error::PathTooCloseToSingularity {
                point: p,
                distance: d,
                margin,
            });
        }
    }
    let z0 = path.basepoint();
    let ws0 = start_roots(q, z0, tol_track)?;
    let total = path.length();
    let h_max = total / INITIAL_STEPS;
    let h_min = total * MIN_STEP_FRACTION;

    let mut steps = vec![TraceStep {
        arc_length: 0.0,
        z: z0,
        roots: ws0.clone(),
    }];
    let sep_min = SEP_MIN_REL * root_scale(&ws0);
    if ws0.len() > 1 && min_separation(&ws0) < sep_min {
        return Err(Error::PairingCollision { at: z0, arc_length: 0.0 });
    }

    let mut s_done = 0.0;
    let mut ws = ws0;
    let mut z = z0;
    for seg in path.segments() {
        let len = seg.length();
        let mut s = 0.0;
        let mut h = h_max;
        while s < len {
            let step = h.min(len - s);
            let frac = if s + step >= len { 1.0 } else { (s + step) / len };
            let z1 = seg.at(frac);
            let sep = SEP_MIN_REL * root_scale(&ws);
            match try_step(q, z, z1, &ws, tol_track, sep) {
                Ok(next) => {
                    s += step;
                    z = z1;
                    ws = next;
                    steps.push(TraceStep {
                        arc_length: s_done + s,
                        z,
                        roots: ws.clone(),
                    });
                    h = (2.0 * h).min(h_max);
                }
                Err(kind) => {
                    h *= 0.5;
                    if h < h_min {
                        return Err(match kind {
                            StepFailure::Collision => Error::PairingCollision {
                                at: z1,
                                arc_length: s_done + s,
                            },
                            StepFailure::Corrector => Error::numeric(
                                format!("root tracking at z = {z1} (arc length {:e})", s_done + s),
                                ws.iter()
                                    .map(|&w| rel_residual(q, z1, w))
                                    .fold(0.0, f64::max),
                            ),
                        });
                    }
                }
            }
        }
        s_done += len;
    }

    let permutation = if path.is_closed() {
        Some(match_ends(&steps[0].roots, &ws)?)
    } else {
        None
    };
    Ok(RootTrace { steps, permutation })
}

/// `sigma` with `end[sigma(j)] ~ start[j]`.
fn match_ends(start: &[Complex64], end: &[Complex64]) -> Result<Permutation> {
    let tol = 1e-6 * root_scale(start);
    let mut sigma = vec![usize::MAX; start.len()];
    let mut used = vec![false; end.len()];
    for (j, s) in start.iter().enumerate() {
        let (k, d) = end
            .iter()
            .enumerate()
            .map(|(k, e)| (k, (e - s).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one root");
        if d > tol || used[k] {
            return Err(Error::InternalConsistency(format!(
                "closed-path end roots do not match start roots (gap {d:e})"
            )));
        }
        used[k] = true;
        sigma[j] = k;
    }
    Ok(Permutation(sigma))
}

/// Monodromy permutation of the roots around a closed path.
pub fn monodromy(q: &BiPoly, closed_path: &PathSpec) -> Result<Permutation> {
    if !closed_path.is_closed() {
        return Err(Error::invalid("monodromy needs a closed path"));
    }
    Ok(track_roots(q, closed_path, 1e-10)?
        .permutation
        .expect("closed path yields a permutation"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuation::Segment;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cycles_display() {
        assert_eq!(Permutation(vec![1, 0]).to_string(), "(1 2)");
        assert_eq!(Permutation(vec![0, 1, 2]).to_string(), "()");
        assert_eq!(Permutation(vec![1, 2, 0]).to_string(), "(1 2 3)");
        assert_eq!(Permutation(vec![1, 2, 0, 3]).cycle_type(), vec![1, 3]);
    }

    #[test]
    fn square_root_on_upper_semicircle() {
        let q = BiPoly::from_real(&[&[0.0, -1.0], &[], &[1.0]]).unwrap();
        let path = PathSpec::new(
            vec![Segment::Arc {
                center: c(0.0, 0.0),
                radius: 1.0,
                start: 0.0,
                sweep: PI,
            }],
            false,
        )
        .unwrap();
        let tr = track_roots(&q, &path, 1e-12).unwrap();
        let j = tr
            .start_roots()
            .iter()
            .position(|w| (w - c(1.0, 0.0)).norm() < 1e-10)
            .unwrap();
        assert!((tr.end_roots()[j] - c(0.0, 1.0)).norm() < 1e-10);
        assert!(tr.permutation.is_none());
    }

    #[test]
    fn graph_root_follows_polynomial() {
        // w - (z^3 - 2z)
        let q = BiPoly::from_real(&[&[0.0, 2.0, 0.0, -1.0], &[1.0]]).unwrap();
        let path = PathSpec::polyline(&[c(-1.0, -1.0), c(2.0, 0.5), c(0.0, 1.5)], false).unwrap();
        let tr = track_roots(&q, &path, 1e-12).unwrap();
        for st in &tr.steps {
            let want = st.z * st.z * st.z - 2.0 * st.z;
            assert!((st.roots[0] - want).norm() < 1e-10);
        }
    }

    #[test]
    fn path_through_branch_point_is_rejected() {
        let q = BiPoly::from_real(&[&[0.0, -1.0], &[], &[1.0]]).unwrap();
        let path = PathSpec::polyline(&[c(-1.0, 0.0), c(1.0, 0.0)], false).unwrap();
        assert!(matches!(
            track_roots(&q, &path, 1e-12),
            Err(Error::PathTooCloseToSingularity { .. })
        ));
    }

    #[test]
    fn csv_rows() {
        let q = BiPoly::from_real(&[&[0.0, -1.0], &[], &[1.0]]).unwrap();
        let tr = track_roots(&q, &PathSpec::circle(c(0.0, 0.0), 1.0, 0.0).unwrap(), 1e-12).unwrap();
        let csv = tr.to_csv();
        assert!(csv.starts_with("step,z_re,z_im,root_index,w_re,w_im\n"));
        assert_eq!(csv.lines().count(), 1 + 2 * tr.steps.len());
    }
}
