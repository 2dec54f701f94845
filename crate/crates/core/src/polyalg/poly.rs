use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::check_finite;
use crate::{Error, Result};

/// Leading coefficients below `TRIM_REL * max|coeff|` are dropped.
pub const TRIM_REL: f64 = 1e-12;

/// Univariate polynomial with complex coefficients in ascending order.
///
/// The zero polynomial has no coefficients. Otherwise the leading coefficient
/// is nonzero and `degree == coeffs.len() - 1`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UniPoly {
    coeffs: Vec<Complex64>,
}

impl UniPoly {
    /// Builds a polynomial, rejecting non-finite coefficients and trimming
    /// negligible leading terms.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if let Some(bad) = coeffs.iter().find(|c| !check_finite(c)) {
            return Err(Error::invalid(format!("non-finite coefficient {bad}")));
        }
        Ok(Self::from_finite(coeffs))
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub(crate) fn from_finite(mut coeffs: Vec<Complex64>) -> Self {
        trim(&mut coeffs);
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_finite(vec![c])
    }

    /// `prod (w - r_i)` scaled by `leading`.
    pub fn from_roots(leading: Complex64, roots: &[Complex64]) -> Self {
        let mut c = vec![leading];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            c = next;
        }
        Self::from_finite(c)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Real part of the value at a real point.
    pub fn eval_re(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c.re)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::from_finite(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, m: usize) -> Self {
        (0..m).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_finite(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Polynomial long division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        if divisor.is_zero() {
            return Err(Error::invalid("division by the zero polynomial"));
        }
        let dd = divisor.degree();
        if self.is_zero() || self.degree() < dd {
            return Ok((Self::zero(), self.clone()));
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut q = vec![Complex64::new(0.0, 0.0); self.degree() - dd + 1];
        for k in (0..q.len()).rev() {
            let c = rem[k + dd] / lead;
            q[k] = c;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= c * d;
            }
            rem[k + dd] = Complex64::new(0.0, 0.0);
        }
        rem.truncate(dd);
        Ok((Self::from_finite(q), Self::from_finite(rem)))
    }

    /// Largest coefficientwise deviation `max_k |self_k - other_k|`.
    pub fn max_coeff_deviation(&self, other: &UniPoly) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Coefficients with only their real parts kept.
    pub fn real_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.re).collect()
    }
}

fn trim(coeffs: &mut Vec<Complex64>) {
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let cut = TRIM_REL * max;
    while let Some(last) = coeffs.last() {
        if last.norm() <= cut {
            coeffs.pop();
        } else {
            break;
        }
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::from_finite((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::from_finite((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::from_finite(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::from_finite(out)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({c})")?;
            }
            match k {
                0 => {}
                1 => write!(f, "*x")?,
                _ => write!(f, "*x^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn trims_negligible_leading_terms() {
        let p = UniPoly::new(vec![c(1.0), c(2.0), c(1e-14), c(0.0)]).unwrap();
        assert_eq!(p.degree(), 1);
        assert!(UniPoly::new(vec![c(0.0), c(0.0)]).unwrap().is_zero());
    }

    #[test]
    fn rejects_nan() {
        assert!(UniPoly::new(vec![c(f64::NAN)]).is_err());
        assert!(UniPoly::from_real(&[1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn division_recovers_factors() {
        let a = UniPoly::from_real(&[1.0, -3.0, 2.0]).unwrap();
        let b = UniPoly::from_real(&[-2.0, 1.0]).unwrap();
        let prod = &a * &b;
        let (q, r) = prod.div_rem(&b).unwrap();
        assert!(r.is_zero() || r.max_abs_coeff() < 1e-14);
        assert!(q.max_coeff_deviation(&a) < 1e-14);
    }

    #[test]
    fn from_roots_expands() {
        let p = UniPoly::from_roots(c(2.0), &[c(1.0), c(-1.0)]);
        assert_eq!(p.real_coeffs(), vec![-2.0, 0.0, 2.0]);
    }

    #[test]
    fn derivative_and_eval() {
        let p = UniPoly::from_real(&[1.0, 0.0, 3.0, 1.0]).unwrap();
        assert_eq!(p.derivative().real_coeffs(), vec![0.0, 6.0, 3.0]);
        assert_eq!(p.eval_re(2.0), 1.0 + 12.0 + 8.0);
        assert!(p.nth_derivative(4).is_zero());
    }
}
