//! Real orthonormal spherical harmonics on `S^2`, product Gauss quadrature
//! on the sphere and Fourier projection of functions of direction.
//!
//! Basis convention: fully normalized real harmonics without the
//! Condon–Shortley phase. Degree `k`, order `m in -k..=k`, indexed by
//! `alpha = m + k + 1`:
//!
//! ```text
//! Y_k^m  = sqrt(2) N_k^m P_k^m(cos θ) cos(m φ)     m > 0
//! Y_k^0  =         N_k^0 P_k(cos θ)
//! Y_k^m  = sqrt(2) N_k^|m| P_k^|m|(cos θ) sin(|m| φ)   m < 0
//! ```
//!
//! Evaluation is done in Cartesian form (`sin^m θ cos mφ = Re (x + iy)^m`) so
//! that `Y_k(-ξ) = (-1)^k Y_k(ξ)` holds exactly in floating point.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::domains::Direction;
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HarmonicIndex {
    pub k: usize,
    pub alpha: usize,
}

impl HarmonicIndex {
    pub fn new(k: usize, alpha: usize) -> Result<Self> {
        if alpha < 1 || alpha > 2 * k + 1 {
            return Err(Error::invalid(format!(
                "harmonic index alpha={alpha} out of range 1..={} for k={k}",
                2 * k + 1
            )));
        }
        Ok(HarmonicIndex { k, alpha })
    }

    /// Index from degree and order `m`.
    pub fn from_order(k: usize, m: i64) -> Result<Self> {
        let alpha = m + k as i64 + 1;
        if alpha < 1 {
            return Err(Error::invalid(format!("order {m} out of range for k={k}")));
        }
        Self::new(k, alpha as usize)
    }

    pub fn order(&self) -> i64 {
        self.alpha as i64 - self.k as i64 - 1
    }

    /// Position in the flat ordering `(0,1), (1,1), (1,2), (1,3), (2,1), ...`.
    pub fn flat(&self) -> usize {
        self.k * self.k + self.alpha - 1
    }

    pub fn from_flat(i: usize) -> Self {
        let k = (i as f64).sqrt().floor() as usize;
        let k = if (k + 1) * (k + 1) <= i { k + 1 } else { k };
        HarmonicIndex {
            k,
            alpha: i - k * k + 1,
        }
    }

    /// All indices with degree `<= k_max`, in flat order.
    pub fn up_to(k_max: usize) -> impl Iterator<Item = HarmonicIndex> {
        (0..(k_max + 1) * (k_max + 1)).map(Self::from_flat)
    }
}

/// Number of real harmonics of degree `<= k_max`.
pub fn harmonic_count(k_max: usize) -> usize {
    (k_max + 1) * (k_max + 1)
}

/// Value of the real harmonic `idx` at a unit vector of `R^3`.
pub fn eval_harmonic(idx: HarmonicIndex, xi: &Direction) -> Result<f64> {
    let [x, y, z] = xi.as_3d()?;
    Ok(eval_all_xyz(idx.k, x, y, z)[idx.flat()])
}

/// All harmonics of degree `<= k_max` at `(x, y, z)` (assumed unit), in flat order.
pub fn eval_all_xyz(k_max: usize, x: f64, y: f64, z: f64) -> Vec<f64> {
    let mut out = vec![0.0; harmonic_count(k_max)];
    eval_all_into(k_max, x, y, z, &mut out);
    out
}

/// Degrees with cached normalization constants.
const NORM_TABLE_DEGREE: usize = 48;

/// `sqrt((2l+1)/(4π) (l-m)!/(l+m)!)` at index `l(l+1)/2 + m`.
fn norm_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::new();
        for l in 0..=NORM_TABLE_DEGREE {
            for m in 0..=l {
                t.push(norm_factor(l, m));
            }
        }
        t
    })
}

fn norm_factor(l: usize, m: usize) -> f64 {
    let mut ratio = 1.0;
    for j in (l - m + 1)..=(l + m) {
        ratio /= j as f64;
    }
    ((2 * l + 1) as f64 / (4.0 * PI) * ratio).sqrt()
}

pub(crate) fn eval_all_into(k_max: usize, x: f64, y: f64, z: f64, out: &mut [f64]) {
    const STACK: usize = NORM_TABLE_DEGREE + 1;
    if k_max > NORM_TABLE_DEGREE {
        let mut c = vec![0.0; k_max + 1];
        let mut s = vec![0.0; k_max + 1];
        eval_with(k_max, x, y, z, out, &mut c, &mut s, |l, m| norm_factor(l, m));
    } else {
        let table = norm_table();
        let (mut c, mut s) = ([0.0; STACK], [0.0; STACK]);
        eval_with(k_max, x, y, z, out, &mut c, &mut s, |l, m| table[l * (l + 1) / 2 + m]);
    }
}

#[allow(clippy::too_many_arguments)]
#[inline(always)]
fn eval_with(
    k_max: usize,
    x: f64,
    y: f64,
    z: f64,
    out: &mut [f64],
    c: &mut [f64],
    s: &mut [f64],
    norm: impl Fn(usize, usize) -> f64,
) {
    // c[m] + i s[m] = (x + i y)^m
    c[0] = 1.0;
    s[0] = 0.0;
    for m in 1..=k_max {
        c[m] = c[m - 1] * x - s[m - 1] * y;
        s[m] = c[m - 1] * y + s[m - 1] * x;
    }
    let mut qmm = 1.0; // (2m-1)!!
    for m in 0..=k_max {
        if m > 0 {
            qmm *= (2 * m - 1) as f64;
        }
        // Reduced associated Legendre Q_l^m(z) = P_l^m / sin^m, l = m..=k_max.
        let mut q_prev = 0.0;
        let mut q_cur = qmm;
        for l in m..=k_max {
            if l > m {
                let lf = l as f64;
                let next = ((2.0 * lf - 1.0) * z * q_cur - (lf + m as f64 - 1.0) * q_prev)
                    / (lf - m as f64);
                q_prev = q_cur;
                q_cur = next;
            }
            let base = l * l + l; // alpha - 1 for m = 0
            if m == 0 {
                out[base] = norm(l, 0) * q_cur;
            } else {
                let v = std::f64::consts::SQRT_2 * norm(l, m) * q_cur;
                out[base + m] = v * c[m];
                out[base - m] = v * s[m];
            }
        }
    }
}

/// Product Gauss quadrature on `S^2`.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    pub nodes: Vec<Direction>,
    pub weights: Vec<f64>,
    /// `antipode[i]` is the node equal to `-nodes[i]` (bitwise).
    pub antipode: Vec<usize>,
    pub l_max: usize,
}

impl SphereQuadrature {
    /// Gauss–Legendre in `cos θ` with `ceil((L+1)/2) + 1` nodes times
    /// `2L + 2` uniform azimuths; exact for polynomials of degree `<= L`.
    pub fn new(l_max: usize) -> Result<Self> {
        if l_max < 1 {
            return Err(Error::invalid("sphere quadrature needs L_max >= 1"));
        }
        let n_theta = (l_max + 1).div_ceil(2) + 1;
        let n_phi = 2 * l_max + 2;
        let gl = GaussLegendre::new(n_theta);
        let half_phi = n_phi / 2;
        let mut cs = vec![(0.0, 0.0); n_phi];
        for j in 0..half_phi {
            let phi = 2.0 * PI * j as f64 / n_phi as f64;
            cs[j] = (phi.cos(), phi.sin());
            cs[j + half_phi] = (-cs[j].0, -cs[j].1);
        }
        let dphi = 2.0 * PI / n_phi as f64;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        let mut antipode = Vec::with_capacity(n_theta * n_phi);
        for i in 0..n_theta {
            let z = gl.nodes[i];
            let st = (1.0 - z * z).sqrt();
            for (j, &(c, s)) in cs.iter().enumerate() {
                nodes.push(Direction::from_unit_unchecked(vec![st * c, st * s, z]));
                weights.push(gl.weights[i] * dphi);
                let ia = n_theta - 1 - i;
                let ja = (j + half_phi) % n_phi;
                antipode.push(ia * n_phi + ja);
            }
        }
        Ok(SphereQuadrature {
            nodes,
            weights,
            antipode,
            l_max,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Harmonic values at every node, `table[node][flat index]`.
    pub fn harmonic_table(&self, k_max: usize) -> Vec<Vec<f64>> {
        self.nodes
            .iter()
            .map(|n| {
                let c = n.components();
                eval_all_xyz(k_max, c[0], c[1], c[2])
            })
            .collect()
    }

    /// Fourier coefficients `v_{k,α} = Σ_i w_i f(ξ_i) Y_{k,α}(ξ_i)`, flat order.
    pub fn fourier_coeffs(&self, values: &[f64], k_max: usize) -> Result<Vec<f64>> {
        self.check_projection(values.len(), k_max)?;
        Ok(project_with_table(&self.harmonic_table(k_max), &self.weights, values))
    }

    pub(crate) fn check_projection(&self, n_values: usize, k_max: usize) -> Result<()> {
        if n_values != self.len() {
            return Err(Error::invalid(format!(
                "expected {} node values, got {n_values}",
                self.len()
            )));
        }
        if self.l_max < 2 * k_max {
            return Err(Error::invalid(format!(
                "quadrature exactness {} < 2 * k_max = {}",
                self.l_max,
                2 * k_max
            )));
        }
        Ok(())
    }
}

pub(crate) fn project_with_table(table: &[Vec<f64>], weights: &[f64], values: &[f64]) -> Vec<f64> {
    let n_h = table.first().map_or(0, Vec::len);
    let mut out = vec![0.0; n_h];
    for ((row, &w), &v) in table.iter().zip(weights).zip(values) {
        let wv = w * v;
        for (o, &y) in out.iter_mut().zip(row) {
            *o += wv * y;
        }
    }
    out
}

/// Sum of a finite real harmonic series at a unit vector.
pub fn synthesize(coeffs: &[f64], k_max: usize, xi: &Direction) -> Result<f64> {
    let [x, y, z] = xi.as_3d()?;
    let ys = eval_all_xyz(k_max, x, y, z);
    Ok(coeffs.iter().zip(&ys).map(|(a, b)| a * b).sum())
}

/// Fourier coefficient functions `v_{k,α}(t)` sampled on a `t` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicExpansion {
    pub t_grid: Vec<f64>,
    pub coeffs: BTreeMap<HarmonicIndex, Vec<f64>>,
    pub k_max: usize,
}

impl HarmonicExpansion {
    /// Projects samples `values[node][t]` onto harmonics of degree `<= k_max`.
    pub fn from_samples(
        quad: &SphereQuadrature,
        t_grid: Vec<f64>,
        values: &[Vec<f64>],
        k_max: usize,
    ) -> Result<Self> {
        quad.check_projection(values.len(), k_max)?;
        let table = quad.harmonic_table(k_max);
        let mut coeffs: BTreeMap<HarmonicIndex, Vec<f64>> = HarmonicIndex::up_to(k_max)
            .map(|i| (i, Vec::with_capacity(t_grid.len())))
            .collect();
        for j in 0..t_grid.len() {
            if values.iter().any(|row| row.len() != t_grid.len()) {
                return Err(Error::invalid("sample rows must match the t grid"));
            }
            let col: Vec<f64> = values.iter().map(|row| row[j]).collect();
            let v = project_with_table(&table, &quad.weights, &col);
            for (i, c) in v.into_iter().enumerate() {
                coeffs
                    .get_mut(&HarmonicIndex::from_flat(i))
                    .expect("index present")
                    .push(c);
            }
        }
        Ok(HarmonicExpansion {
            t_grid,
            coeffs,
            k_max,
        })
    }

    /// `Σ_{k,α} v_{k,α}(t_j)^2` for each grid point.
    pub fn energy(&self) -> Vec<f64> {
        (0..self.t_grid.len())
            .map(|j| self.coeffs.values().map(|v| v[j] * v[j]).sum())
            .collect()
    }

    /// CSV with columns `k,alpha,t,v`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,alpha,t,v\n");
        for (idx, vals) in &self.coeffs {
            for (t, v) in self.t_grid.iter().zip(vals) {
                let _ = writeln!(s, "{},{},{:.16e},{:.16e}", idx.k, idx.alpha, t, v);
            }
        }
        s
    }
}
