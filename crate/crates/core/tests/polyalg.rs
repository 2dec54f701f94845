use cutvol_core::polyalg::{discriminant_wrt_w, polyfit, resultant_wrt_w, roots, sylvester_resultant};
use cutvol_core::{BiPoly, Complex64, UniPoly};
use proptest::prelude::*;

fn cx() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Roots from `from_roots` come back (as a multiset) from the solver.
    #[test]
    fn roots_of_product_form(rs in prop::collection::vec(cx(), 1..7), lead in cx()) {
        prop_assume!(lead.norm() > 0.1);
        let min_gap = rs.iter().enumerate()
            .flat_map(|(i, a)| rs[i + 1..].iter().map(move |b| (a - b).norm()))
            .fold(f64::INFINITY, f64::min);
        prop_assume!(min_gap > 1e-2);
        let p = UniPoly::from_roots(lead, &rs);
        let found = roots(&p, 1e-12).unwrap();
        prop_assert_eq!(found.len(), rs.len());
        for r in &rs {
            let d = found.iter().map(|f| (f - r).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(d < 1e-7, "root {} missed by {}", r, d);
        }
    }

    /// Interpolated resultant agrees with the resultant of each slice.
    #[test]
    fn resultant_matches_sylvester_slices(
        rows in prop::collection::vec(prop::collection::vec(cx(), 1..4), 2..5),
        z in cx(),
    ) {
        let q = BiPoly::new(rows).unwrap();
        let n = q.deg_w();
        prop_assume!(n >= 1 && q.leading_in_w().eval(z).norm() > 1e-2);
        let f = q.at_z(z);
        let s = sylvester_resultant(&f, &f.derivative()).unwrap();
        let r = resultant_wrt_w(&q).eval(z);
        prop_assert!((r - s).norm() <= 1e-8 * (1.0 + s.norm()), "{} vs {}", r, s);
    }

    /// `Res = q_N * Disc` as polynomials in `z`.
    #[test]
    fn resultant_factors_through_discriminant(
        rows in prop::collection::vec(prop::collection::vec(cx(), 1..4), 3..5),
        z in cx(),
    ) {
        let q = BiPoly::new(rows).unwrap();
        let res = resultant_wrt_w(&q);
        prop_assume!(!res.is_zero());
        let disc = discriminant_wrt_w(&q).unwrap();
        let lhs = res.eval(z);
        let rhs = q.leading_in_w().eval(z) * disc.eval(z);
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm()));
    }

    /// Fitting samples of a low-degree polynomial recovers it.
    #[test]
    fn polyfit_recovers_exact_polynomials(c in prop::collection::vec(-2.0f64..2.0, 1..6)) {
        let p = UniPoly::from_real(&c).unwrap();
        let samples: Vec<(f64, f64)> = (0..31).map(|i| {
            let t = -1.0 + i as f64 / 15.0;
            (t, p.eval_re(t))
        }).collect();
        let fit = polyfit(&samples, 8).unwrap();
        prop_assert!(fit.residual < 1e-10);
        prop_assert!(fit.degree_used <= c.len() - 1);
        for (i, ci) in c.iter().enumerate() {
            prop_assert!((fit.poly.coeff(i).re - ci).abs() < 1e-8);
        }
    }
}

#[test]
fn classical_discriminant_of_quadratic() {
    // w^2 + b w + c: Disc = b^2 - 4c with b = z, c = 1.
    let q = BiPoly::from_real(&[&[1.0], &[0.0, 1.0], &[1.0]]).unwrap();
    let d = discriminant_wrt_w(&q).unwrap();
    let expected = UniPoly::from_real(&[-4.0, 0.0, 1.0]).unwrap();
    assert!(d.max_coeff_deviation(&expected) < 1e-12, "{d}");
}
