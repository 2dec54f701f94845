use std::f64::consts::PI;

use num_complex::Complex64;

use super::{BiPoly, UniPoly};
use crate::{Error, Result};

/// Resultant of `f` and `g` in the product convention.
///
/// Computes the Sylvester determinant and multiplies it by
/// `(-1)^(N(N-1)/2)` with `N = deg f`, so that for `g = f'` the value equals
/// `lead(f)^(2N-1) * prod_{i<j} (w_i - w_j)^2`.
pub fn sylvester_resultant(f: &UniPoly, g: &UniPoly) -> Result<Complex64> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::invalid("resultant of the zero polynomial"));
    }
    if f.degree() < 1 {
        return Err(Error::invalid("resultant needs deg f >= 1"));
    }
    Ok(signed_resultant(f.coeffs(), g.coeffs()).0)
}

/// Resultant with formal degrees `len - 1` (leading zeros allowed), together
/// with the Hadamard bound of the Sylvester matrix.
pub(crate) fn signed_resultant(f: &[Complex64], g: &[Complex64]) -> (Complex64, f64) {
    let m = f.len() - 1;
    let (det, bound) = sylvester_det(f, g);
    let sign = if (m * (m.saturating_sub(1)) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    (det * sign, bound)
}

fn sylvester_det(f: &[Complex64], g: &[Complex64]) -> (Complex64, f64) {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    if size == 0 {
        return (Complex64::new(1.0, 0.0), 1.0);
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut a = vec![zero; size * size];
    // n shifted rows of f, then m shifted rows of g, descending powers.
    for r in 0..n {
        for (j, &c) in f.iter().rev().enumerate() {
            a[r * size + r + j] = c;
        }
    }
    for r in 0..m {
        for (j, &c) in g.iter().rev().enumerate() {
            a[(n + r) * size + r + j] = c;
        }
    }
    let bound: f64 = (0..size)
        .map(|r| {
            a[r * size..(r + 1) * size]
                .iter()
                .map(|c| c.norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .product();
    (determinant(&mut a, size), bound)
}

/// LU with partial pivoting; destroys `a`.
fn determinant(a: &mut [Complex64], n: usize) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
            .unwrap();
        let p = a[pivot * n + col];
        if p.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        det *= p;
        for r in col + 1..n {
            let factor = a[r * n + col] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let v = a[col * n + k];
                a[r * n + k] -= factor * v;
            }
        }
    }
    det
}

/// Inverse DFT of samples at `z_j = exp(i (offset + 2 pi j / S))`.
fn interpolate_on_circle(values: &[Complex64], offset: f64) -> UniPoly {
    let s = values.len();
    let coeffs = (0..s)
        .map(|k| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let ang = -2.0 * PI * ((j * k) % s) as f64 / s as f64;
                    v * Complex64::from_polar(1.0, ang)
                })
                .sum();
            sum / s as f64 * Complex64::from_polar(1.0, -(k as f64) * offset)
        })
        .collect();
    UniPoly::from_finite(coeffs)
}

fn circle_point(j: usize, s: usize, offset: f64) -> Complex64 {
    Complex64::from_polar(1.0, offset + 2.0 * PI * j as f64 / s as f64)
}

/// Slice coefficients and their `w`-derivative.
fn slice(q: &BiPoly, z: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
    let f = q.coeffs_in_w(z);
    let df = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect();
    (f, df)
}

/// `Res(Q, dQ/dw)` as a polynomial in `z`.
///
/// Evaluated at `D + 1` roots of unity, `D = (2N - 1) * deg_z Q`, and
/// interpolated by an inverse DFT. Returns the zero polynomial when every
/// sample is negligible against the Hadamard bound of its Sylvester matrix
/// (`Q` has a repeated factor).
pub fn resultant_wrt_w(q: &BiPoly) -> UniPoly {
    let n = q.deg_w();
    let samples = (2 * n - 1) * q.deg_z() + 1;
    let mut values = Vec::with_capacity(samples);
    let mut max_bound: f64 = 0.0;
    let mut max_val: f64 = 0.0;
    for j in 0..samples {
        let (f, df) = slice(q, circle_point(j, samples, 0.0));
        let (r, b) = signed_resultant(&f, &df);
        max_bound = max_bound.max(b);
        max_val = max_val.max(r.norm());
        values.push(r);
    }
    if max_val <= 1e-11 * max_bound {
        return UniPoly::zero();
    }
    interpolate_on_circle(&values, 0.0)
}

/// `Disc` with `Res(Q, dQ/dw) = q_N * Disc`, checked by re-multiplication.
///
/// Divides pointwise on a rotated circle of roots of unity (the rotation
/// keeps the samples away from zeros of `q_N`) and interpolates; long
/// division by `q_N` is unstable when its top coefficient is small.
pub fn discriminant_wrt_w(q: &BiPoly) -> Result<UniPoly> {
    let res = resultant_wrt_w(q);
    if res.is_zero() {
        return Ok(UniPoly::zero());
    }
    let n = q.deg_w();
    let lead = q.leading_in_w();
    let samples = (2 * n - 2) * q.deg_z() + 1;
    let offset = (0..8)
        .map(|k| PI * k as f64 / (4.0 * samples as f64))
        .max_by(|&a, &b| {
            let worst = |o: f64| {
                (0..samples)
                    .map(|j| lead.eval(circle_point(j, samples, o)).norm())
                    .fold(f64::INFINITY, f64::min)
            };
            worst(a).total_cmp(&worst(b))
        })
        .expect("nonempty");
    let values: Vec<Complex64> = (0..samples)
        .map(|j| {
            let (f, df) = slice(q, circle_point(j, samples, offset));
            signed_resultant(&f, &df).0 / f[n]
        })
        .collect();
    let disc = interpolate_on_circle(&values, offset);
    let back = &lead * &disc;
    let dev = back.max_coeff_deviation(&res);
    let tol = 1e-9 * (1.0 + res.max_abs_coeff());
    if dev > tol {
        return Err(Error::InternalConsistency(format!(
            "Res / q_N is not exact: deviation {dev:e} > {tol:e}"
        )));
    }
    Ok(disc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn poly(c: &[f64]) -> UniPoly {
        UniPoly::from_real(c).unwrap()
    }

    #[test]
    fn linear_pair() {
        let (a, b) = (2.5, -1.0);
        let r = sylvester_resultant(&poly(&[-a, 1.0]), &poly(&[-b, 1.0])).unwrap();
        assert!((r - c(a - b)).norm() < 1e-14);
        let r = sylvester_resultant(&poly(&[-a, 1.0]), &poly(&[-a, 1.0])).unwrap();
        assert!(r.norm() < 1e-14);
    }

    #[test]
    fn square_root_pair_gives_four() {
        // f = w^2 - 1, roots +-1, (w1 - w2)^2 = 4.
        let f = poly(&[-1.0, 0.0, 1.0]);
        let r = sylvester_resultant(&f, &f.derivative()).unwrap();
        assert!((r - c(4.0)).norm() < 1e-13, "{r}");
    }

    #[test]
    fn double_root_annihilates() {
        let f = poly(&[4.0, -4.0, 1.0]);
        let r = sylvester_resultant(&f, &f.derivative()).unwrap();
        assert!(r.norm() < 1e-13);
    }

    #[test]
    fn zero_input_is_rejected() {
        assert!(sylvester_resultant(&UniPoly::zero(), &poly(&[1.0])).is_err());
        assert!(sylvester_resultant(&poly(&[1.0, 1.0]), &UniPoly::zero()).is_err());
        assert!(sylvester_resultant(&poly(&[3.0]), &poly(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn resultant_of_square_root_curve() {
        let q = BiPoly::from_real(&[&[0.0, -1.0], &[], &[1.0]]).unwrap();
        let r = resultant_wrt_w(&q);
        assert_eq!(r.degree(), 1);
        assert!(r.max_coeff_deviation(&poly(&[0.0, 4.0])) < 1e-13);
    }

    #[test]
    fn resultant_of_graph_is_one() {
        let p = poly(&[1.0, -2.0, 0.0, 5.0]);
        let r = resultant_wrt_w(&BiPoly::graph_of(&p));
        assert!(r.max_coeff_deviation(&poly(&[1.0])) < 1e-13);
    }

    #[test]
    fn resultant_of_two_lines() {
        // w^2 - 3 z w + 2 z^2 has roots z, 2z.
        let q = BiPoly::from_real(&[&[0.0, 0.0, 2.0], &[0.0, -3.0], &[1.0]]).unwrap();
        let r = resultant_wrt_w(&q);
        assert!(r.max_coeff_deviation(&poly(&[0.0, 0.0, 1.0])) < 1e-13, "{r}");
    }

    #[test]
    fn discriminant_divides_out_leading_coefficient() {
        let q = BiPoly::from_real(&[&[0.0, -1.0], &[], &[1.0]]).unwrap();
        let d = discriminant_wrt_w(&q).unwrap();
        assert!(d.max_coeff_deviation(&poly(&[0.0, 4.0])) < 1e-13);

        let q2 = BiPoly::from_real(&[&[0.0, -2.0], &[], &[2.0]]).unwrap();
        let res = resultant_wrt_w(&q2);
        let d2 = discriminant_wrt_w(&q2).unwrap();
        assert!((&d2.scale(c(2.0)) - &res).max_abs_coeff() < 1e-12);
        assert!(res.max_coeff_deviation(&poly(&[0.0, 32.0])) < 1e-12);

        let q3 = BiPoly::graph_of(&poly(&[0.0, 1.0, 1.0]));
        assert_eq!(discriminant_wrt_w(&q3).unwrap().degree(), 0);
    }

    #[test]
    fn repeated_factor_gives_zero_resultant() {
        // (w - z)^2
        let q = BiPoly::from_real(&[&[0.0, 0.0, 1.0], &[0.0, -2.0], &[1.0]]).unwrap();
        assert!(resultant_wrt_w(&q).is_zero());
    }
}
