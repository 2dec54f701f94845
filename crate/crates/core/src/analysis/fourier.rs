use std::fmt::Write as _;

use serde::Serialize;

use super::{polynomiality_test, window_profiles, AnalysisWindow, DEFAULT_POLY_TOL};
use crate::domains::DomainSpec;
use crate::harmonics::{HarmonicExpansion, HarmonicIndex, SphereQuadrature};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierOptions {
    pub t_samples: usize,
    pub tol: f64,
    /// Sphere-quadrature exactness; `None` means [`FourierOptions::default_level`].
    pub quad_level: Option<usize>,
}

impl FourierOptions {
    /// `6 * k_max`. Non-ellipsoidal cut volumes carry harmonics far above
    /// `k_max`; at exactness `2 * k_max` (or even `4 * k_max` for a 10%
    /// perturbation) they alias into the low coefficients and masquerade as
    /// non-polynomial behaviour.
    pub fn default_level(k_max: usize) -> usize {
        (6 * k_max).max(2)
    }
}

impl Default for FourierOptions {
    fn default() -> Self {
        FourierOptions {
            t_samples: 41,
            tol: DEFAULT_POLY_TOL,
            quad_level: None,
        }
    }
}

/// Polynomiality test of one coefficient function `v_{k,α}(t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierRow {
    pub index: HarmonicIndex,
    pub degree_cap: usize,
    pub degree_used: usize,
    pub fit_residual: f64,
    pub holdout_residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl FourierRow {
    pub fn ratio(&self) -> f64 {
        self.holdout_residual / self.threshold
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierReport {
    pub window: AnalysisWindow,
    pub quad_level: usize,
    pub rows: Vec<FourierRow>,
    pub expansion: HarmonicExpansion,
}

impl FourierReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Row with the largest held-out residual relative to its threshold.
    pub fn worst(&self) -> Option<&FourierRow> {
        self.rows.iter().max_by(|a, b| a.ratio().total_cmp(&b.ratio()))
    }

    /// CSV `k,alpha,degree_cap,degree_used,fit_residual,holdout_residual,threshold,pass`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,alpha,degree_cap,degree_used,fit_residual,holdout_residual,threshold,pass\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{:.16e},{:.16e},{:.16e},{}",
                r.index.k, r.index.alpha, r.degree_cap, r.degree_used, r.fit_residual, r.holdout_residual, r.threshold, r.pass
            );
        }
        s
    }
}

/// Samples `V` on quadrature nodes times a window grid, projects onto
/// harmonics of degree `<= k_max` and tests each coefficient function for
/// polynomiality with degree cap `k + 4` (`k + n + 1` for `n = 3`).
pub fn fourier_polynomiality_report(
    d: &DomainSpec,
    k_max: usize,
    window: &AnalysisWindow,
    opts: &FourierOptions,
) -> Result<FourierReport> {
    if d.dim() != 3 {
        return Err(Error::invalid("Fourier analysis is implemented for n = 3"));
    }
    let level = opts.quad_level.unwrap_or(FourierOptions::default_level(k_max)).max(1);
    let quad = SphereQuadrature::new(level)?;
    let grid = window.grid(opts.t_samples);
    let values = window_profiles(d, &quad, &grid)?;
    let expansion = HarmonicExpansion::from_samples(&quad, grid.clone(), &values, k_max)?;
    let mut rows = Vec::new();
    for (idx, v) in &expansion.coeffs {
        let cap = idx.k + d.dim() + 1;
        let samples: Vec<(f64, f64)> = grid.iter().copied().zip(v.iter().copied()).collect();
        let out = polynomiality_test(&samples, cap, opts.tol)?;
        rows.push(FourierRow {
            index: *idx,
            degree_cap: cap,
            degree_used: out.fit.degree_used,
            fit_residual: out.fit.residual,
            holdout_residual: out.holdout_residual,
            threshold: out.threshold,
            pass: out.is_poly,
        });
    }
    Ok(FourierReport {
        window: *window,
        quad_level: level,
        rows,
        expansion,
    })
}
