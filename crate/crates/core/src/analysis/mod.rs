//! Verifiers that combine sections, harmonics and fits: polynomiality of
//! cut volumes and of their Fourier coefficients, Radon inversion, Taylor
//! moment orthogonality, tangency exponents and the ellipsoid certificate.

mod certificate;
mod fourier;
mod inversion;
mod moments;

pub use certificate::{
    ellipsoid_certificate, moment_fit_ellipsoid, CertificateOptions, CertificateReport, Counterexample,
    MomentEllipsoid, TestRecord, Verdict,
};
pub use fourier::{fourier_polynomiality_report, FourierOptions, FourierReport, FourierRow};
pub use inversion::{radon_inversion_check, InversionOptions, InversionReport, ProbeResidual, INVERSION_CONSTANT_3D};
pub use moments::{taylor_moment_orthogonality, MomentOptions, MomentReport, MomentRow, TaylorMoments};

use serde::Serialize;

use crate::domains::{fibonacci_sphere, Direction, DomainSpec};
use crate::harmonics::SphereQuadrature;
use crate::polyalg::{polyfit, FitResult};
use crate::sectioning::{cut_volume_profiles, tail_volume};
use crate::{Error, Result};

/// Default cross-validation tolerance (relative to `1 + max|y|`).
pub const DEFAULT_POLY_TOL: f64 = 1e-6;

/// Common `t`-interval `(-epsilon, epsilon)` inside every sampled support interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisWindow {
    pub epsilon: f64,
}

impl AnalysisWindow {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid("window half-width must be positive"));
        }
        Ok(AnalysisWindow { epsilon })
    }

    /// `0.9 * min_xi min(h_+(xi), -h_-(xi))` over the quadrature nodes.
    pub fn from_domain(d: &DomainSpec, quad: &SphereQuadrature) -> Result<Self> {
        let mut m = f64::INFINITY;
        for xi in &quad.nodes {
            let s = d.support_interval(xi)?;
            m = m.min(s.h_plus).min(-s.h_minus);
        }
        if !(m > 0.0) {
            return Err(Error::invalid(
                "the origin must be an interior point of the domain for windowed analysis",
            ));
        }
        Self::new(0.9 * m)
    }

    /// `m` equispaced points on `[-epsilon, epsilon]`, exactly symmetric about 0.
    pub fn grid(&self, m: usize) -> Vec<f64> {
        let mut g: Vec<f64> = (0..m)
            .map(|i| self.epsilon * (-1.0 + 2.0 * i as f64 / (m - 1) as f64))
            .collect();
        for i in 0..m / 2 {
            g[m - 1 - i] = -g[i];
        }
        if m % 2 == 1 {
            g[m / 2] = 0.0;
        }
        g
    }
}

/// `V(xi_i, t_m)` for every quadrature node on a symmetric grid. Only one
/// node of each antipodal pair is integrated; its partner follows from
/// `V(-xi, t) = vol - V(xi, -t)`.
pub(crate) fn window_profiles(d: &DomainSpec, quad: &SphereQuadrature, grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    let m = grid.len();
    debug_assert!((0..m).all(|i| grid[i] == -grid[m - 1 - i]));
    let reps: Vec<usize> = (0..quad.len()).filter(|&i| quad.antipode[i] >= i).collect();
    let dirs: Vec<Direction> = reps.iter().map(|&i| quad.nodes[i].clone()).collect();
    let profiles = cut_volume_profiles(d, &dirs, grid)?;
    let vol = d.volume()?;
    let mut out = vec![Vec::new(); quad.len()];
    for (&i, p) in reps.iter().zip(profiles) {
        let j = quad.antipode[i];
        if j != i {
            out[j] = p.values.iter().rev().map(|v| vol - v).collect();
        }
        out[i] = p.values;
    }
    Ok(out)
}

/// Outcome of [`polynomiality_test`].
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialityOutcome {
    pub is_poly: bool,
    /// Fit on all samples.
    pub fit: FitResult,
    /// Max deviation on the held-out half when fitting the other half.
    pub holdout_residual: f64,
    /// `tol * (1 + max|y|)`.
    pub threshold: f64,
}

impl PolynomialityOutcome {
    /// Held-out residual in units of the threshold.
    pub fn ratio(&self) -> f64 {
        self.holdout_residual / self.threshold
    }
}

/// Cross-validated polynomiality: fit every other sample (sorted by `t`),
/// measure the deviation on the remaining ones.
///
/// Needs `2 * max_degree + 4` samples so that the training half satisfies
/// the fitting precondition.
pub fn polynomiality_test(samples: &[(f64, f64)], max_degree: usize, tol: f64) -> Result<PolynomialityOutcome> {
    if samples.len() < 2 * max_degree + 4 {
        return Err(Error::invalid(format!(
            "polynomiality test at degree {max_degree} needs at least {} samples, got {}",
            2 * max_degree + 4,
            samples.len()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    // keep both ends in the training set so held-out points are interpolated
    let last = sorted.len() - 1;
    let (train, held): (Vec<_>, Vec<_>) = sorted
        .iter()
        .enumerate()
        .partition(|(i, _)| i % 2 == 0 || *i == last);
    let train: Vec<(f64, f64)> = train.into_iter().map(|(_, s)| *s).collect();
    let held: Vec<(f64, f64)> = held.into_iter().map(|(_, s)| *s).collect();
    let fit_train = polyfit(&train, max_degree)?;
    let holdout_residual = held
        .iter()
        .map(|&(t, y)| (fit_train.poly.eval_re(t) - y).abs())
        .fold(0.0, f64::max);
    let y_max = samples.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
    let threshold = tol * (1.0 + y_max);
    Ok(PolynomialityOutcome {
        is_poly: holdout_residual <= threshold,
        fit: polyfit(&sorted, max_degree)?,
        holdout_residual,
        threshold,
    })
}

/// `n` spiral directions followed by the three coordinate axes.
pub fn test_directions(n: usize) -> Vec<Direction> {
    let mut out: Vec<Direction> = fibonacci_sphere(n)
        .into_iter()
        .map(|p| Direction::new(p.to_vec()).expect("unit spiral point"))
        .collect();
    out.extend((0..3).map(|i| Direction::axis(3, i)));
    out
}

/// Slope of `log(vol - V(xi, h_+ - delta))` against `log delta` for
/// `delta` log-spaced over `[1e-3, 1e-1] * (h_+ - h_-)`.
pub fn tangency_exponent(d: &DomainSpec, xi: &Direction) -> Result<f64> {
    let s = d.support_interval(xi)?;
    let w = s.width();
    let m = 16;
    let mut pts = Vec::with_capacity(m);
    for i in 0..m {
        let delta = w * 10f64.powf(-3.0 + 2.0 * i as f64 / (m - 1) as f64);
        let tail = tail_volume(d, xi, s.h_plus - delta)?;
        if !(tail > 0.0) {
            return Err(Error::numeric("tangency exponent: nonpositive tail volume", tail));
        }
        pts.push((delta.ln(), tail.ln()));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sectioning::unit_ball_cut_volume;

    #[test]
    fn cubic_passes_quartic_fails() {
        let cubic: Vec<(f64, f64)> = (0..41)
            .map(|i| {
                let t = -1.0 + 0.05 * i as f64;
                (t, 1.0 + t - t * t * t / 3.0)
            })
            .collect();
        let out = polynomiality_test(&cubic, 3, 1e-6).unwrap();
        assert!(out.is_poly);
        assert_eq!(out.fit.degree_used, 3);

        let quartic: Vec<(f64, f64)> = cubic.iter().map(|&(t, _)| (t, t.powi(4))).collect();
        assert!(!polynomiality_test(&quartic, 3, 1e-6).unwrap().is_poly);
        assert!(polynomiality_test(&quartic[..9], 3, 1e-6).is_err());
    }

    #[test]
    fn disk_near_tangency_is_not_polynomial() {
        let samples: Vec<(f64, f64)> = (0..41)
            .map(|i| {
                let t = 0.8 + 0.2 * i as f64 / 40.0;
                (t, unit_ball_cut_volume(2, t))
            })
            .collect();
        assert!(!polynomiality_test(&samples, 10, 1e-6).unwrap().is_poly);
    }

    #[test]
    fn window_needs_interior_origin() {
        let q = SphereQuadrature::new(4).unwrap();
        let b = DomainSpec::unit_ball(3).unwrap();
        let w = AnalysisWindow::from_domain(&b, &q).unwrap();
        assert!((w.epsilon - 0.9).abs() < 1e-12);
        let off = DomainSpec::ball(vec![2.0, 0.0, 0.0], 1.0).unwrap();
        assert!(AnalysisWindow::from_domain(&off, &q).is_err());
    }

    #[test]
    fn exponents_of_disk_and_ball() {
        let disk = DomainSpec::unit_ball(2).unwrap();
        let g = tangency_exponent(&disk, &Direction::axis(2, 0)).unwrap();
        assert!((g - 1.5).abs() < 0.05, "{g}");
        let ball = DomainSpec::unit_ball(3).unwrap();
        let g = tangency_exponent(&ball, &Direction::axis(3, 2)).unwrap();
        assert!((g - 2.0).abs() < 0.05, "{g}");
    }

    #[test]
    fn directions_include_axes() {
        let d = test_directions(64);
        assert_eq!(d.len(), 67);
        assert_eq!(d[66].components(), &[0.0, 0.0, 1.0]);
    }
}
