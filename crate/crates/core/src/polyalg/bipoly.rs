use num_complex::Complex64;

use super::{check_finite, UniPoly};
use crate::{Error, Result};

/// Bivariate polynomial `Q(z, w) = sum_i sum_k q[i][k] z^k w^i`.
///
/// Row `i` holds the coefficient polynomial of `w^i` in ascending powers of
/// `z`. The top row `q[N]` is not identically zero and `N >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiPoly {
    q: Vec<Vec<Complex64>>,
}

impl BiPoly {
    pub fn new(mut q: Vec<Vec<Complex64>>) -> Result<Self> {
        for row in &q {
            if let Some(bad) = row.iter().find(|c| !check_finite(c)) {
                return Err(Error::invalid(format!("non-finite coefficient {bad}")));
            }
        }
        while q
            .last()
            .is_some_and(|row| row.iter().all(|c| c.norm() == 0.0))
        {
            q.pop();
        }
        if q.len() < 2 {
            return Err(Error::invalid("Q must have degree >= 1 in w"));
        }
        Ok(BiPoly { q })
    }

    /// Real coefficients, `rows[i][k]` multiplying `z^k w^i`.
    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    /// Builds `Q` from `(w_power, z_power, coefficient)` triples.
    pub fn from_terms(terms: &[(usize, usize, Complex64)]) -> Result<Self> {
        let n = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let mut q = vec![Vec::new(); n + 1];
        for &(i, k, c) in terms {
            let row: &mut Vec<Complex64> = &mut q[i];
            if row.len() <= k {
                row.resize(k + 1, Complex64::new(0.0, 0.0));
            }
            row[k] += c;
        }
        Self::new(q)
    }

    /// `w - p(z)`.
    pub fn graph_of(p: &UniPoly) -> Self {
        let q0 = if p.is_zero() {
            vec![Complex64::new(0.0, 0.0)]
        } else {
            p.coeffs().iter().map(|&c| -c).collect()
        };
        BiPoly {
            q: vec![q0, vec![Complex64::new(1.0, 0.0)]],
        }
    }

    pub fn rows(&self) -> &[Vec<Complex64>] {
        &self.q
    }

    /// `N`, the degree in `w`.
    pub fn deg_w(&self) -> usize {
        self.q.len() - 1
    }

    /// Largest `z`-degree over all rows.
    pub fn deg_z(&self) -> usize {
        self.q
            .iter()
            .map(|row| {
                row.iter()
                    .rposition(|c| c.norm() != 0.0)
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.q
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Coefficients of `Q(z, .)` in ascending powers of `w`, formal length `N + 1`.
    pub fn coeffs_in_w(&self, z: Complex64) -> Vec<Complex64> {
        self.q.iter().map(|row| horner(row, z)).collect()
    }

    /// `Q(z, .)` as a (trimmed) polynomial in `w`.
    pub fn at_z(&self, z: Complex64) -> UniPoly {
        UniPoly::from_finite(self.coeffs_in_w(z))
    }

    /// `q_N(z)`.
    pub fn leading_in_w(&self) -> UniPoly {
        UniPoly::from_finite(self.q[self.deg_w()].clone())
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        horner(&self.coeffs_in_w(z), w)
    }

    /// `(Q, dQ/dw, dQ/dz)` at `(z, w)`.
    pub fn eval_with_partials(&self, z: Complex64, w: Complex64) -> (Complex64, Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut q = zero;
        let mut q_w = zero;
        let mut q_z = zero;
        // Horner in w with per-row (value, z-derivative).
        for row in self.q.iter().rev() {
            let (a, da) = horner_with_derivative(row, z);
            q_w = q_w * w + q;
            q = q * w + a;
            q_z = q_z * w + da;
        }
        (q, q_w, q_z)
    }

    /// Magnitude scale of `Q` near `(z, w)`: `sum_{i,k} |q_ik| |z|^k |w|^i`.
    pub fn scale_at(&self, z: Complex64, w: Complex64) -> f64 {
        let az = z.norm();
        let aw = w.norm();
        let mut s = 0.0;
        let mut wp = 1.0;
        for row in &self.q {
            let mut zp = 1.0;
            for c in row {
                s += c.norm() * zp * wp;
                zp *= az;
            }
            wp *= aw;
        }
        s
    }
}

pub(crate) fn horner(c: &[Complex64], x: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a)
}

fn horner_with_derivative(c: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut p = zero;
    let mut dp = zero;
    for &a in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + a;
    }
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn rejects_constant_in_w() {
        assert!(BiPoly::from_real(&[&[1.0, 2.0]]).is_err());
        assert!(BiPoly::from_real(&[&[1.0], &[0.0, 0.0]]).is_err());
    }

    #[test]
    fn partials_match_finite_differences() {
        // Q = w^3 z + (z^2 - 1) w - 2 z
        let q = BiPoly::from_terms(&[(3, 1, c(1.0)), (1, 2, c(1.0)), (1, 0, c(-1.0)), (0, 1, c(-2.0))])
            .unwrap();
        let z = Complex64::new(0.3, -0.7);
        let w = Complex64::new(-1.1, 0.4);
        let (v, qw, qz) = q.eval_with_partials(z, w);
        assert!((v - q.eval(z, w)).norm() < 1e-14);
        let h = 1e-6;
        let fd_w = (q.eval(z, w + h) - q.eval(z, w - h)) / (2.0 * h);
        let fd_z = (q.eval(z + h, w) - q.eval(z - h, w)) / (2.0 * h);
        assert!((qw - fd_w).norm() < 1e-8);
        assert!((qz - fd_z).norm() < 1e-8);
        assert_eq!(q.deg_w(), 3);
        assert_eq!(q.deg_z(), 2);
    }
}
