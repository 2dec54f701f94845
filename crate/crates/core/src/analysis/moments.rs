use serde::Serialize;

use super::AnalysisWindow;
use crate::domains::DomainSpec;
use crate::harmonics::{project_with_table, HarmonicIndex, SphereQuadrature};
use crate::polyalg::polyfit_degree;
use crate::sectioning::cut_volume_profiles;
use crate::{Error, Result};

/// Order of the `t`-derivative whose Taylor coefficients are examined (`n + 2`).
const DERIVATIVE_ORDER: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentOptions {
    /// Sphere-quadrature exactness; `None` means `max(36, 6 * j_max)`. The
    /// `b_j` of a non-ellipsoid carry harmonics of high degree, and coarser
    /// rules alias them into the low-degree projections being tested.
    pub quad_level: Option<usize>,
    pub t_samples: usize,
    /// Degree of the polynomial surrogate of `V` on the window.
    pub fit_degree: usize,
}

impl Default for MomentOptions {
    fn default() -> Self {
        MomentOptions {
            quad_level: None,
            t_samples: 41,
            fit_degree: 12,
        }
    }
}

/// `b[j][node]`: Taylor coefficients at `t = 0` of `d^5 V / dt^5`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaylorMoments {
    pub quad_level: usize,
    pub b: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub j: usize,
    /// `L^2(S^2)` norm of `b_j`.
    pub norm: f64,
    /// `max_{k <= j, α} |<b_j, Y_{k,α}>|`.
    pub max_projection: f64,
    pub worst_index: HarmonicIndex,
    /// `max_projection / norm`, or 0 when `b_j` is numerically zero.
    pub ratio: f64,
    /// `max |b_j(-xi) - (-1)^j b_j(xi)| / max |b_j|` over antipodal nodes (0 if zero).
    pub parity_defect: f64,
    pub vanishes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub window: AnalysisWindow,
    pub rows: Vec<MomentRow>,
    pub moments: TaylorMoments,
}

impl MomentReport {
    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(0.0, f64::max)
    }

    pub fn max_parity_defect(&self) -> f64 {
        self.rows.iter().map(|r| r.parity_defect).fold(0.0, f64::max)
    }
}

fn falling(a: usize, m: usize) -> f64 {
    (0..m).map(|i| (a - i) as f64).product()
}

/// Checks that `b_j` is orthogonal to all harmonics of degree `<= j` and
/// has parity `(-1)^j`.
pub fn taylor_moment_orthogonality(
    d: &DomainSpec,
    j_max: usize,
    window: &AnalysisWindow,
    opts: &MomentOptions,
) -> Result<MomentReport> {
    if d.dim() != 3 {
        return Err(Error::invalid("moment analysis is implemented for n = 3"));
    }
    if j_max + DERIVATIVE_ORDER > opts.fit_degree {
        return Err(Error::invalid(format!(
            "j_max = {j_max} needs a surrogate of degree >= {}",
            j_max + DERIVATIVE_ORDER
        )));
    }
    let level = opts.quad_level.unwrap_or((6 * j_max).max(36));
    let quad = SphereQuadrature::new(level)?;
    let grid = window.grid(opts.t_samples);
    let vol = d.volume()?;
    // Every node is integrated directly so the parity defect is a real check.
    let profiles = cut_volume_profiles(d, &quad.nodes, &grid)?;
    let mut b = vec![vec![0.0; quad.len()]; j_max + 1];
    for (i, p) in profiles.iter().enumerate() {
        let samples: Vec<(f64, f64)> = grid.iter().copied().zip(p.values.iter().copied()).collect();
        let d5 = polyfit_degree(&samples, opts.fit_degree)?.poly.nth_derivative(DERIVATIVE_ORDER);
        for (j, row) in b.iter_mut().enumerate() {
            row[i] = d5.coeff(j).re;
        }
    }
    let table = quad.harmonic_table(j_max);
    let eps = window.epsilon;
    let mut rows = Vec::with_capacity(j_max + 1);
    for (j, bj) in b.iter().enumerate() {
        let sq: Vec<f64> = bj.iter().map(|x| x * x).collect();
        let norm = quad.integrate(&sq).sqrt();
        // noise floor of a degree-(j+5) coefficient fitted to values accurate to ~1e-10 vol
        let floor = 1e-7 * vol * falling(j + DERIVATIVE_ORDER, DERIVATIVE_ORDER) / eps.powi((j + DERIVATIVE_ORDER) as i32);
        let vanishes = norm <= floor;
        let proj = project_with_table(&table, &quad.weights, bj);
        let (mut worst, mut worst_idx) = (0.0, HarmonicIndex { k: 0, alpha: 1 });
        for (f, &c) in proj.iter().enumerate() {
            let idx = HarmonicIndex::from_flat(f);
            if idx.k <= j && c.abs() >= worst {
                worst = c.abs();
                worst_idx = idx;
            }
        }
        let bmax = bj.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let parity = bj
            .iter()
            .enumerate()
            .map(|(i, &x)| (bj[quad.antipode[i]] - sign * x).abs())
            .fold(0.0, f64::max);
        rows.push(MomentRow {
            j,
            norm,
            max_projection: worst,
            worst_index: worst_idx,
            ratio: if vanishes { 0.0 } else { worst / norm },
            parity_defect: if vanishes { 0.0 } else { parity / bmax },
            vanishes,
        });
    }
    Ok(MomentReport {
        window: *window,
        rows,
        moments: TaylorMoments { quad_level: level, b },
    })
}
