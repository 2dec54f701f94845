//! Benchmark fixtures shared by the criterion benches.

use cutvol_core::{BiPoly, Complex64, Direction, DomainSpec};

/// `rho = 1 + 0.1 Y_4`, the standard non-ellipsoidal test body.
pub fn perturbed_sphere() -> DomainSpec {
    DomainSpec::perturbed_sphere(0.1).expect("valid amplitude")
}

pub fn tilted_direction() -> Direction {
    Direction::new(vec![0.3, 0.4, 0.8]).expect("nonzero")
}

/// Symmetric `t` grid of `m` points on `[-h, h]`.
pub fn window_grid(h: f64, m: usize) -> Vec<f64> {
    (0..m).map(|i| -h + 2.0 * h * i as f64 / (m - 1) as f64).collect()
}

/// Dense bivariate polynomial with `deg_w = n`, `deg_z = m` and
/// deterministic, well-spread coefficients; monic in `w`.
pub fn dense_bipoly(n: usize, m: usize) -> BiPoly {
    let mut rows: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..=m)
                .map(|k| {
                    let a = 1.0 + (i * 7 + k * 3) as f64;
                    Complex64::new((0.7 * a).sin(), (1.3 * a).cos())
                })
                .collect()
        })
        .collect();
    rows.push(vec![Complex64::new(1.0, 0.0)]);
    BiPoly::new(rows).expect("finite coefficients")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_well_formed() {
        let q = dense_bipoly(4, 3);
        assert_eq!((q.deg_w(), q.deg_z()), (4, 3));
        let g = window_grid(0.5, 11);
        assert!((g[0] + 0.5).abs() < 1e-15 && (g[10] - 0.5).abs() < 1e-15);
        assert!(perturbed_sphere().contains(&[0.0, 0.0, 0.0]));
        assert!((tilted_direction().components()[2] - 0.8 / 0.89f64.sqrt()).abs() < 1e-15);
    }
}
