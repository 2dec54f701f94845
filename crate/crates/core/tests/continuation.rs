use cutvol_core::continuation::{singular_points, track_roots, upper_lower_contours};
use cutvol_core::{BiPoly, Complex64, Error, PathSpec};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn square_root_curve_has_one_branch_point() {
    let q = BiPoly::from_real(&[&[0.0, -1.0], &[], &[1.0]]).unwrap();
    let s = singular_points(&q).unwrap();
    assert_eq!(s.points.len(), 1);
    assert!(s.points[0].norm() < 1e-6);
    assert!(s.enclosing_radius >= 1.0);
}

#[test]
fn open_path_follows_analytic_roots() {
    // w^2 = z + 2 along [0, 1]: roots +-sqrt(z + 2) stay separated.
    let q = BiPoly::from_real(&[&[-2.0, -1.0], &[], &[1.0]]).unwrap();
    let path = PathSpec::polyline(&[c(0.0, 0.0), c(1.0, 0.0)], false).unwrap();
    let tr = track_roots(&q, &path, 1e-12).unwrap();
    assert!(tr.permutation.is_none());
    let mut start: Vec<f64> = tr.start_roots().iter().map(|w| w.re).collect();
    let mut end: Vec<f64> = tr.end_roots().iter().map(|w| w.re).collect();
    start.sort_by(f64::total_cmp);
    end.sort_by(f64::total_cmp);
    assert!((start[1] - 2f64.sqrt()).abs() < 1e-10);
    assert!((end[1] - 3f64.sqrt()).abs() < 1e-10);
    let csv = tr.to_csv();
    assert!(csv.lines().count() > 2);
}

#[test]
fn path_through_branch_point_is_refused() {
    let q = BiPoly::from_real(&[&[0.0, -1.0], &[], &[1.0]]).unwrap();
    let path = PathSpec::polyline(&[c(-1.0, 0.0), c(1.0, 0.0)], false).unwrap();
    assert!(matches!(track_roots(&q, &path, 1e-10), Err(Error::PathTooCloseToSingularity { .. })));
}

#[test]
fn contours_close_at_basepoint() {
    let (up, down) = upper_lower_contours(c(0.2, 0.0), 2.0).unwrap();
    for p in [&up, &down] {
        assert!(p.is_closed());
        assert!((p.basepoint() - c(0.2, 0.0)).norm() < 1e-14);
        assert!((p.length() - (2.0 * std::f64::consts::PI + 4.0)).abs() < 1e-12);
    }
}
