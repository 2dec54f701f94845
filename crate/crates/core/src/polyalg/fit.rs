use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::UniPoly;
use crate::{Error, Result};

/// Least-squares polynomial fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Fitted polynomial in the original variable.
    pub poly: UniPoly,
    /// `max_i |poly(t_i) - y_i|` over the input samples.
    pub residual: f64,
    pub degree_used: usize,
}

/// Fits `y ~ p(t)` with `deg p <= max_degree`.
///
/// Every degree up to `max_degree` is fitted (Legendre basis on the sample
/// span, solved by SVD); the lowest degree whose max residual is within
/// `2 * r_max + 1e-12 * (1 + max|y|)` of the full fit is returned.
pub fn polyfit(samples: &[(f64, f64)], max_degree: usize) -> Result<FitResult> {
    let (center, half, y_scale) = validate(samples, max_degree)?;
    let fits: Vec<(UniPoly, f64)> = (0..=max_degree)
        .map(|d| {
            let poly = fit_exact_degree(samples, center, half, d);
            let r = max_residual(&poly, samples);
            (poly, r)
        })
        .collect();
    let r_max = fits[max_degree].1;
    let accept = 2.0 * r_max + 1e-12 * (1.0 + y_scale);
    let d = fits.iter().position(|f| f.1 <= accept).unwrap_or(max_degree);
    let (poly, residual) = fits[d].clone();
    Ok(FitResult {
        poly,
        residual,
        degree_used: d,
    })
}

/// Least-squares fit at exactly `degree` (no degree selection), so the map
/// from sample values to coefficients is linear.
pub fn polyfit_degree(samples: &[(f64, f64)], degree: usize) -> Result<FitResult> {
    let (center, half, _) = validate(samples, degree)?;
    let poly = fit_exact_degree(samples, center, half, degree);
    let residual = max_residual(&poly, samples);
    Ok(FitResult {
        poly,
        residual,
        degree_used: degree,
    })
}

fn validate(samples: &[(f64, f64)], max_degree: usize) -> Result<(f64, f64, f64)> {
    if samples.len() < max_degree + 2 {
        return Err(Error::invalid(format!(
            "polyfit needs at least {} samples, got {}",
            max_degree + 2,
            samples.len()
        )));
    }
    if samples.iter().any(|(t, y)| !t.is_finite() || !y.is_finite()) {
        return Err(Error::invalid("non-finite sample"));
    }
    let mut ts: Vec<f64> = samples.iter().map(|s| s.0).collect();
    ts.sort_by(f64::total_cmp);
    let (lo, hi) = (ts[0], ts[ts.len() - 1]);
    let span = hi - lo;
    if span <= 0.0 || ts.windows(2).any(|w| w[1] - w[0] <= 1e-14 * span) {
        return Err(Error::invalid("polyfit needs distinct sample abscissae"));
    }
    let y_scale = samples.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
    Ok((0.5 * (lo + hi), 0.5 * span, y_scale))
}

fn fit_exact_degree(samples: &[(f64, f64)], center: f64, half: f64, degree: usize) -> UniPoly {
    let coeffs_u = legendre_lsq(samples, center, half, degree);
    UniPoly::from_finite(
        rescale(&coeffs_u, center, half)
            .into_iter()
            .map(|c| Complex64::new(c, 0.0))
            .collect(),
    )
}

fn max_residual(poly: &UniPoly, samples: &[(f64, f64)]) -> f64 {
    samples
        .iter()
        .map(|&(t, y)| (poly.eval_re(t) - y).abs())
        .fold(0.0, f64::max)
}

fn legendre_lsq(samples: &[(f64, f64)], center: f64, half: f64, degree: usize) -> Vec<f64> {
    let m = samples.len();
    let cols = degree + 1;
    let a = DMatrix::from_fn(m, cols, |i, k| legendre((samples[i].0 - center) / half, k));
    let b = DVector::from_iterator(m, samples.iter().map(|s| s.1));
    let svd = a.svd(true, true);
    let x = svd
        .solve(&b, 1e-14)
        .unwrap_or_else(|_| DVector::zeros(cols));
    // Legendre -> monomial in u via the three-term recurrence.
    let mut mono = vec![0.0; cols];
    let mut p_prev: Vec<f64> = vec![1.0];
    let mut p_cur: Vec<f64> = vec![0.0, 1.0];
    for (k, &xk) in x.iter().enumerate() {
        if k >= 2 {
            let kf = k as f64;
            let mut next = vec![0.0; k + 1];
            for (j, &c) in p_cur.iter().enumerate() {
                next[j + 1] += (2.0 * kf - 1.0) / kf * c;
            }
            for (j, &c) in p_prev.iter().enumerate() {
                next[j] -= (kf - 1.0) / kf * c;
            }
            p_prev = std::mem::replace(&mut p_cur, next);
        }
        let pk = if k == 0 { &p_prev } else { &p_cur };
        for (j, &c) in pk.iter().enumerate() {
            mono[j] += xk * c;
        }
    }
    mono
}

fn legendre(u: f64, k: usize) -> f64 {
    let (mut p0, mut p1) = (1.0, u);
    if k == 0 {
        return p0;
    }
    for j in 2..=k {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * u * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Monomial coefficients in `u = (t - center) / half` -> monomial in `t`.
fn rescale(coeffs_u: &[f64], center: f64, half: f64) -> Vec<f64> {
    let n = coeffs_u.len();
    let mut out = vec![0.0; n];
    // (t - c)^k / h^k expanded binomially.
    for (k, &a) in coeffs_u.iter().enumerate() {
        let s = a / half.powi(k as i32);
        let mut binom = 1.0;
        for j in 0..=k {
            // coefficient of t^j in (t - c)^k is C(k, j) (-c)^(k-j)
            out[j] += s * binom * (-center).powi((k - j) as i32);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }
    out
}

/// Complex least-squares fit `w ~ p(z)` with `deg p <= max_degree`, in the
/// monomial basis of `(z - c) / h` where `c` is the sample centroid and `h`
/// the sample radius. Degree selection follows [`polyfit`].
pub fn polyfit_complex(z: &[Complex64], w: &[Complex64], max_degree: usize) -> Result<FitResult> {
    if z.len() != w.len() {
        return Err(Error::invalid("sample length mismatch"));
    }
    if z.len() < max_degree + 2 {
        return Err(Error::invalid(format!(
            "polyfit needs at least {} samples, got {}",
            max_degree + 2,
            z.len()
        )));
    }
    let m = z.len();
    let center = z.iter().sum::<Complex64>() / m as f64;
    let half = z.iter().map(|p| (p - center).norm()).fold(0.0, f64::max);
    if half == 0.0 {
        return Err(Error::invalid("polyfit needs distinct sample points"));
    }
    let w_scale = w.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let u: Vec<Complex64> = z.iter().map(|p| (p - center) / half).collect();

    let fits: Vec<(UniPoly, f64)> = (0..=max_degree)
        .map(|d| {
            let a = DMatrix::from_fn(m, d + 1, |i, k| u[i].powu(k as u32));
            let b = DVector::from_column_slice(w);
            let x = a
                .svd(true, true)
                .solve(&b, 1e-14)
                .unwrap_or_else(|_| DVector::zeros(d + 1));
            let poly = shift_complex(x.as_slice(), center, half);
            let r = z
                .iter()
                .zip(w)
                .map(|(&zi, &wi)| (poly.eval(zi) - wi).norm())
                .fold(0.0, f64::max);
            (poly, r)
        })
        .collect();
    let r_max = fits[max_degree].1;
    let accept = 2.0 * r_max + 1e-12 * (1.0 + w_scale);
    let d = fits.iter().position(|f| f.1 <= accept).unwrap_or(max_degree);
    let (poly, residual) = fits[d].clone();
    Ok(FitResult {
        poly,
        residual,
        degree_used: d,
    })
}

fn shift_complex(coeffs_u: &[Complex64], center: Complex64, half: f64) -> UniPoly {
    let n = coeffs_u.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (k, &a) in coeffs_u.iter().enumerate() {
        let s = a / half.powi(k as i32);
        let mut binom = 1.0;
        for j in 0..=k {
            out[j] += s * binom * (-center).powu((k - j) as u32);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }
    UniPoly::from_finite(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize, a: f64, b: f64) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn square_is_degree_two() {
        let s: Vec<_> = grid(11, -1.0, 1.0).into_iter().map(|t| (t, t * t)).collect();
        let fit = polyfit(&s, 4).unwrap();
        assert!(fit.residual <= 1e-12);
        assert_eq!(fit.degree_used, 2);
    }

    #[test]
    fn absolute_value_is_not_low_degree() {
        let s: Vec<_> = grid(41, -1.0, 1.0).into_iter().map(|t| (t, t.abs())).collect();
        let fit = polyfit(&s, 6).unwrap();
        assert!(fit.residual > 1e-3, "{}", fit.residual);
    }

    #[test]
    fn ball_cut_cubic_coefficients() {
        // pi * integral_{-1}^{t} (1 - s^2) ds = pi (2/3 + t - t^3/3)
        let v = |t: f64| PI * (2.0 / 3.0 + t - t * t * t / 3.0);
        let s: Vec<_> = grid(21, -1.0, 1.0).into_iter().map(|t| (t, v(t))).collect();
        let fit = polyfit(&s, 3).unwrap();
        let want = [2.0 * PI / 3.0, PI, 0.0, -PI / 3.0];
        for (k, w) in want.iter().enumerate() {
            assert!((fit.poly.coeff(k).re - w).abs() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn off_center_window() {
        let p = |t: f64| 1.0 - 2.0 * t + 0.5 * t.powi(3) - 0.1 * t.powi(5);
        let s: Vec<_> = grid(30, 2.0, 3.5).into_iter().map(|t| (t, p(t))).collect();
        let fit = polyfit(&s, 7).unwrap();
        assert_eq!(fit.degree_used, 5);
        assert!(fit.residual < 1e-10 * (1.0 + 30.0));
    }

    #[test]
    fn repeated_abscissa_is_rejected() {
        let s = vec![(0.0, 1.0), (0.0, 2.0), (1.0, 0.0), (2.0, 1.0)];
        assert!(polyfit(&s, 1).is_err());
        assert!(polyfit(&s[..2], 1).is_err());
    }

    #[test]
    fn complex_fit_on_circle() {
        let p = UniPoly::from_real(&[1.0, 0.0, 1.0]).unwrap();
        let z: Vec<Complex64> = (0..40)
            .map(|j| Complex64::from_polar(3.0, 2.0 * PI * j as f64 / 40.0))
            .collect();
        let w: Vec<Complex64> = z.iter().map(|&x| p.eval(x)).collect();
        let fit = polyfit_complex(&z, &w, 4).unwrap();
        assert_eq!(fit.degree_used, 2);
        assert!(fit.poly.max_coeff_deviation(&p) < 1e-12);
    }
}
