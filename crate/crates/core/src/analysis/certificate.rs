use std::fmt::Write as _;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use super::{
    fourier_polynomiality_report, polynomiality_test, test_directions, AnalysisWindow, FourierOptions,
    DEFAULT_POLY_TOL,
};
use crate::domains::{Direction, DomainSpec};
use crate::harmonics::{HarmonicIndex, SphereQuadrature};
use crate::sectioning::cut_volume_profile;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateOptions {
    /// Spiral directions for per-direction tests (the three axes are added).
    pub directions: usize,
    pub k_max: usize,
    pub t_samples: usize,
    pub tol: f64,
    /// Parity defect threshold, relative to the volume.
    pub parity_tol: f64,
    /// Boundary distance threshold, relative to the mean radius.
    pub boundary_tol: f64,
    pub moment_quad_level: usize,
    pub fourier: FourierOptions,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions {
            directions: 64,
            k_max: 6,
            t_samples: 41,
            tol: DEFAULT_POLY_TOL,
            parity_tol: 1e-6,
            boundary_tol: 1e-3,
            moment_quad_level: 48,
            fourier: FourierOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestRecord {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl TestRecord {
    fn new(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        TestRecord {
            name: name.into(),
            statistic,
            threshold,
            pass: statistic <= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub test: String,
    pub statistic: f64,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<HarmonicIndex>,
}

/// Ellipsoid with the same centroid and second moments as the domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEllipsoid {
    pub center: Vec<f64>,
    /// Semi-axes, ascending.
    pub axes: Vec<f64>,
    /// Unit axis directions matching `axes`.
    pub axis_directions: Vec<Vec<f64>>,
    /// Max radial gap between the domain boundary and the fitted ellipsoid.
    pub boundary_distance: f64,
    pub mean_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub verdict: Verdict,
    pub tests: Vec<TestRecord>,
    pub counterexample: Option<Counterexample>,
    pub moment_ellipsoid: MomentEllipsoid,
}

impl CertificateReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "verdict: {}",
            match self.verdict {
                Verdict::Pass => "pass (consistent with an ellipsoid at the tested resolution)",
                Verdict::Fail => "fail",
            }
        );
        for t in &self.tests {
            let _ = writeln!(
                s,
                "  [{}] {}: {:.3e} (threshold {:.3e})",
                if t.pass { "pass" } else { "FAIL" },
                t.name,
                t.statistic,
                t.threshold
            );
        }
        let e = &self.moment_ellipsoid;
        let _ = writeln!(
            s,
            "moment-fit ellipsoid: axes {:?}, center {:?}, boundary distance {:.3e}",
            e.axes, e.center, e.boundary_distance
        );
        if let Some(c) = &self.counterexample {
            let _ = write!(s, "counterexample: {} ({:.3e} > {:.3e})", c.test, c.statistic, c.threshold);
            if let Some(d) = &c.direction {
                let _ = write!(s, " at direction {d:?}");
            }
            if let Some(k) = &c.coefficient {
                let _ = write!(s, " at coefficient k={} alpha={}", k.k, k.alpha);
            }
            s.push('\n');
        }
        s
    }
}

/// Second-moment ellipsoid of a star-shaped domain (about its center) and
/// the radial boundary distance to it.
pub fn moment_fit_ellipsoid(d: &DomainSpec, quad_level: usize) -> Result<MomentEllipsoid> {
    if d.dim() != 3 {
        return Err(Error::invalid("moment fit is implemented for n = 3"));
    }
    let quad = SphereQuadrature::new(quad_level)?;
    let c = d.center();
    let radii: Vec<f64> = quad.nodes.iter().map(|u| d.boundary_radius(u.components())).collect();
    let (mut m0, mut m1, mut m2) = (0.0, Vector3::zeros(), Matrix3::zeros());
    for ((u, w), &r) in quad.nodes.iter().zip(&quad.weights).zip(&radii) {
        let u = Vector3::from_column_slice(u.components());
        m0 += w * r.powi(3) / 3.0;
        m1 += u * (w * r.powi(4) / 4.0);
        m2 += u * u.transpose() * (w * r.powi(5) / 5.0);
    }
    let g = m1 / m0;
    let cov = m2 / m0 - g * g.transpose();
    // E = A B + b has covariance A A^T / 5
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let axes: Vec<f64> = order.iter().map(|&i| (5.0 * eig.eigenvalues[i].max(0.0)).sqrt()).collect();
    if axes.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::numeric("moment-fit ellipsoid is degenerate", 0.0));
    }
    let vecs: Vec<Vector3<f64>> = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    // A^{-1} = V diag(1/a) V^T
    let mut a_inv = Matrix3::zeros();
    for (v, a) in vecs.iter().zip(&axes) {
        a_inv += v * v.transpose() / *a;
    }
    let q = a_inv * g;
    let mut dist: f64 = 0.0;
    let mut mean = 0.0;
    for ((u, w), &r) in quad.nodes.iter().zip(&quad.weights).zip(&radii) {
        let p = a_inv * Vector3::from_column_slice(u.components());
        let (pp, pq, qq) = (p.dot(&p), p.dot(&q), q.dot(&q));
        let r_fit = (pq + (pq * pq - pp * (qq - 1.0)).max(0.0).sqrt()) / pp;
        dist = dist.max((r - r_fit).abs());
        mean += w * r;
    }
    Ok(MomentEllipsoid {
        center: (0..3).map(|i| c[i] + g[i]).collect(),
        axes,
        axis_directions: vecs.iter().map(|v| v.iter().copied().collect()).collect(),
        boundary_distance: dist,
        mean_radius: mean / (4.0 * std::f64::consts::PI),
    })
}

struct DirectionCheck {
    xi: Direction,
    holdout_rel: f64,
    parity_rel: f64,
}

fn check_direction(d: &DomainSpec, xi: &Direction, vol: f64, opts: &CertificateOptions) -> Result<DirectionCheck> {
    let s = d.support_interval(xi)?;
    let m = opts.t_samples;
    let grid: Vec<f64> = (0..m)
        .map(|i| s.h_minus + s.width() * i as f64 / (m - 1) as f64)
        .collect();
    let fwd = cut_volume_profile(d, xi, &grid)?;
    let neg_grid: Vec<f64> = grid.iter().rev().map(|t| -t).collect();
    let back = cut_volume_profile(d, &xi.neg(), &neg_grid)?;
    let samples: Vec<(f64, f64)> = grid.iter().copied().zip(fwd.values.iter().copied()).collect();
    let out = polynomiality_test(&samples, d.dim(), opts.tol)?;
    let parity = fwd
        .values
        .iter()
        .zip(back.values.iter().rev())
        .map(|(v, vb)| (vb - (vol - v)).abs())
        .fold(0.0, f64::max);
    Ok(DirectionCheck {
        xi: xi.clone(),
        holdout_rel: out.holdout_residual / out.threshold * opts.tol,
        parity_rel: parity / vol,
    })
}

/// Runs the Fourier report, per-direction polynomiality of degree `n` over
/// the whole support, the parity invariant, and the second-moment ellipsoid
/// fit. `pass` means consistent with an ellipsoid at the tested resolution.
pub fn ellipsoid_certificate(d: &DomainSpec, opts: &CertificateOptions) -> Result<CertificateReport> {
    if d.dim() != 3 {
        return Err(Error::invalid("the certificate is implemented for n = 3"));
    }
    let vol = d.volume()?;
    let level = opts.fourier.quad_level.unwrap_or(FourierOptions::default_level(opts.k_max)).max(1);
    let quad = SphereQuadrature::new(level)?;
    let window = AnalysisWindow::from_domain(d, &quad)?;
    let fopts = FourierOptions {
        quad_level: Some(level),
        ..opts.fourier
    };
    let fourier = fourier_polynomiality_report(d, opts.k_max, &window, &fopts)?;

    let mut tests = Vec::new();
    let mut candidates: Vec<Counterexample> = Vec::new();
    for row in &fourier.rows {
        let name = format!("fourier_polynomiality[k={},alpha={}]", row.index.k, row.index.alpha);
        tests.push(TestRecord::new(&name, row.holdout_residual, row.threshold));
        candidates.push(Counterexample {
            test: name,
            statistic: row.holdout_residual,
            threshold: row.threshold,
            direction: None,
            coefficient: Some(row.index),
        });
    }

    let dirs = test_directions(opts.directions);
    let checks = dirs
        .par_iter()
        .map(|xi| check_direction(d, xi, vol, opts))
        .collect::<Result<Vec<_>>>()?;
    let worst_poly = checks
        .iter()
        .max_by(|a, b| a.holdout_rel.total_cmp(&b.holdout_rel))
        .expect("at least the axes");
    tests.push(TestRecord::new("direction_polynomiality", worst_poly.holdout_rel, opts.tol));
    candidates.push(Counterexample {
        test: "direction_polynomiality".into(),
        statistic: worst_poly.holdout_rel,
        threshold: opts.tol,
        direction: Some(worst_poly.xi.components().to_vec()),
        coefficient: None,
    });
    let worst_par = checks
        .iter()
        .max_by(|a, b| a.parity_rel.total_cmp(&b.parity_rel))
        .expect("at least the axes");
    tests.push(TestRecord::new("parity_invariant", worst_par.parity_rel, opts.parity_tol));
    candidates.push(Counterexample {
        test: "parity_invariant".into(),
        statistic: worst_par.parity_rel,
        threshold: opts.parity_tol,
        direction: Some(worst_par.xi.components().to_vec()),
        coefficient: None,
    });

    let fit = moment_fit_ellipsoid(d, opts.moment_quad_level)?;
    let rel = fit.boundary_distance / fit.mean_radius;
    tests.push(TestRecord::new("moment_ellipsoid_boundary_distance", rel, opts.boundary_tol));
    candidates.push(Counterexample {
        test: "moment_ellipsoid_boundary_distance".into(),
        statistic: rel,
        threshold: opts.boundary_tol,
        direction: None,
        coefficient: None,
    });

    let pass = tests.iter().all(|t| t.pass);
    let counterexample = if pass {
        None
    } else {
        candidates
            .into_iter()
            .filter(|c| c.statistic > c.threshold)
            .max_by(|a, b| (a.statistic / a.threshold).total_cmp(&(b.statistic / b.threshold)))
    };
    Ok(CertificateReport {
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        tests,
        counterexample,
        moment_ellipsoid: fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_moment_fit_is_the_ball() {
        let b = DomainSpec::ball(vec![0.1, -0.2, 0.3], 1.5).unwrap();
        let f = moment_fit_ellipsoid(&b, 24).unwrap();
        for a in &f.axes {
            assert!((a - 1.5).abs() < 1e-10);
        }
        assert!((f.center[2] - 0.3).abs() < 1e-12);
        assert!(f.boundary_distance < 1e-10);
    }

    #[test]
    fn ellipsoid_axes_recovered() {
        let e = DomainSpec::diag_ellipsoid(&[1.0, 2.0, 3.0]).unwrap();
        let f = moment_fit_ellipsoid(&e, 48).unwrap();
        for (a, w) in f.axes.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - w).abs() < 1e-6, "{:?}", f.axes);
        }
    }

    #[test]
    fn ball_certificate_passes() {
        let b = DomainSpec::unit_ball(3).unwrap();
        let opts = CertificateOptions {
            directions: 8,
            k_max: 2,
            ..Default::default()
        };
        let rep = ellipsoid_certificate(&b, &opts).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{}", rep.to_text());
        assert!(rep.counterexample.is_none());
        assert!(rep.to_json().contains("\"verdict\": \"pass\""));
    }
}
