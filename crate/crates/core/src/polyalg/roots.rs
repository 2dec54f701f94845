use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::UniPoly;
use crate::{Error, Result};

/// Iteration cap for the simultaneous (Aberth–Ehrlich) iteration.
pub const ROOT_ITERATION_CAP: usize = 200;

/// All `deg f` roots of `f`, with multiplicity.
///
/// Aberth–Ehrlich iteration, falling back to the eigenvalues of the companion
/// matrix. Roots are accepted when `max |f(r)| / (1 + max|coeff|) <= tol`.
/// The output is sorted by real part, then imaginary part.
pub fn roots(f: &UniPoly, tol: f64) -> Result<Vec<Complex64>> {
    if f.is_zero() || f.degree() < 1 {
        return Err(Error::invalid("root finding needs deg f >= 1"));
    }
    let scale = 1.0 + f.max_abs_coeff();
    let residual = |rs: &[Complex64]| -> f64 {
        rs.iter().map(|&r| f.eval(r).norm()).fold(0.0, f64::max) / scale
    };

    let mut found = aberth(f);
    let mut best = residual(&found);
    if best > tol {
        if let Some(eig) = companion_eigenvalues(f) {
            let r = residual(&eig);
            if r < best {
                found = eig;
                best = r;
            }
        }
    }
    if !(best <= tol) {
        return Err(Error::numeric("polynomial root finding", best));
    }
    sort_roots(&mut found);
    Ok(found)
}

pub(crate) fn sort_roots(rs: &mut [Complex64]) {
    let key = |z: &Complex64| ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64);
    rs.sort_by_key(key);
}

fn aberth(f: &UniPoly) -> Vec<Complex64> {
    let n = f.degree();
    let lead = f.leading();
    let monic: Vec<Complex64> = f.coeffs().iter().map(|&c| c / lead).collect();
    let df: Vec<Complex64> = monic
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect();

    let center = -monic[n - 1] / n as f64;
    let radius = (1..=n)
        .map(|k| monic[n - k].norm().powf(1.0 / k as f64))
        .fold(0.0, f64::max)
        .max(1e-3)
        * 2.0;
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| center + Complex64::from_polar(radius, 2.0 * PI * j as f64 / n as f64 + 0.4))
        .collect();

    for _ in 0..ROOT_ITERATION_CAP {
        let mut max_step: f64 = 0.0;
        for j in 0..n {
            let p = horner(&monic, z[j]);
            if p.norm() == 0.0 {
                continue;
            }
            let dp = horner(&df, z[j]);
            let ratio = p / dp;
            let sum: Complex64 = (0..n)
                .filter(|&k| k != j)
                .map(|k| {
                    let d = z[j] - z[k];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if step.re.is_finite() && step.im.is_finite() {
                z[j] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[j].norm()));
            }
        }
        if max_step <= 1e-15 {
            break;
        }
    }
    z
}

fn horner(c: &[Complex64], x: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a)
}

fn companion_eigenvalues(f: &UniPoly) -> Option<Vec<Complex64>> {
    let n = f.degree();
    let lead = f.leading();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -f.coeff(i) / lead;
    }
    let schur = m.try_schur(1e-15, 10_000)?;
    let (_, t) = schur.unpack();
    Some((0..n).map(|i| t[(i, i)]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imaginary_unit_pair() {
        let f = UniPoly::from_real(&[1.0, 0.0, 1.0]).unwrap();
        let r = roots(&f, 1e-12).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn double_root_reported_twice() {
        let tol = 1e-12;
        let f = UniPoly::from_real(&[4.0, -4.0, 1.0]).unwrap();
        let r = roots(&f, tol).unwrap();
        assert_eq!(r.len(), 2);
        for z in &r {
            assert!((z - 2.0).norm() <= tol.sqrt(), "{z}");
        }
    }

    #[test]
    fn companion_fallback_agrees() {
        let f = UniPoly::from_real(&[-6.0, 11.0, -6.0, 1.0]).unwrap();
        let mut eig = companion_eigenvalues(&f).unwrap();
        sort_roots(&mut eig);
        let r = roots(&f, 1e-12).unwrap();
        for (a, b) in r.iter().zip(&eig) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn constant_is_rejected() {
        assert!(roots(&UniPoly::from_real(&[2.0]).unwrap(), 1e-12).is_err());
    }
}
