use cutvol_core::analysis::{
    ellipsoid_certificate, moment_fit_ellipsoid, radon_inversion_check, taylor_moment_orthogonality,
    CertificateOptions, InversionOptions, MomentOptions,
};
use cutvol_core::{AffineMap, AnalysisWindow, DomainSpec, SphereQuadrature, Verdict};

fn rotated_123() -> DomainSpec {
    // rotation about (1,1,1) by 0.7 rad, applied to diag(1,2,3)
    let (s, c) = 0.7f64.sin_cos();
    let k = 1.0 / 3f64.sqrt();
    let u = [k, k, k];
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let cross = match (i, j) {
                (0, 1) => -u[2],
                (0, 2) => u[1],
                (1, 0) => u[2],
                (1, 2) => -u[0],
                (2, 0) => -u[1],
                (2, 1) => u[0],
                _ => 0.0,
            };
            r[i][j] = if i == j { c } else { 0.0 } + s * cross + (1.0 - c) * u[i] * u[j];
        }
    }
    let axes = [1.0, 2.0, 3.0];
    let rows: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| r[i][j] * axes[j]).collect()).collect();
    DomainSpec::ellipsoid(AffineMap::from_rows(&rows, &[0.1, -0.2, 0.1]).unwrap()).unwrap()
}

fn quick() -> CertificateOptions {
    CertificateOptions {
        directions: 12,
        k_max: 2,
        ..Default::default()
    }
}

#[test]
fn rotated_ellipsoid_certificate_recovers_axes() {
    let rep = ellipsoid_certificate(&rotated_123(), &quick()).unwrap();
    assert_eq!(rep.verdict, Verdict::Pass, "{}", rep.to_text());
    assert!(rep.counterexample.is_none());
    for (a, e) in rep.moment_ellipsoid.axes.iter().zip([1.0, 2.0, 3.0]) {
        assert!((a - e).abs() < 1e-3, "{:?}", rep.moment_ellipsoid.axes);
    }
}

#[test]
fn ball_moment_fit_is_the_ball() {
    let e = moment_fit_ellipsoid(&DomainSpec::unit_ball(3).unwrap(), 48).unwrap();
    for a in &e.axes {
        assert!((a - 1.0).abs() < 1e-4);
    }
    assert!(e.center.iter().all(|c| c.abs() < 1e-4));
}

#[test]
fn perturbed_sphere_certificate_names_a_counterexample() {
    let rep = ellipsoid_certificate(&DomainSpec::perturbed_sphere(0.1).unwrap(), &quick()).unwrap();
    assert_eq!(rep.verdict, Verdict::Fail);
    let c = rep.counterexample.as_ref().expect("counterexample");
    assert!(c.statistic > c.threshold);
    assert!(c.direction.is_some() || c.coefficient.is_some(), "{}", rep.to_text());
    let json = rep.to_json();
    assert!(json.contains("\"verdict\": \"fail\""));
}

#[test]
fn perturbed_sphere_moments_are_orthogonal_to_low_harmonics() {
    let d = DomainSpec::perturbed_sphere(0.1).unwrap();
    let w = AnalysisWindow::from_domain(&d, &SphereQuadrature::new(8).unwrap()).unwrap();
    let rep = taylor_moment_orthogonality(&d, 4, &w, &MomentOptions::default()).unwrap();
    assert!(rep.rows.iter().any(|r| !r.vanishes), "{:?}", rep.rows);
    assert!(rep.max_ratio() <= 1e-3, "{:?}", rep.rows);
    assert!(rep.max_parity_defect() <= 1e-3, "{:?}", rep.rows);
}

#[test]
fn ellipsoid_moments_vanish() {
    let d = rotated_123();
    let d = d.translated(&[-0.1, 0.2, -0.1]).unwrap();
    let w = AnalysisWindow::from_domain(&d, &SphereQuadrature::new(8).unwrap()).unwrap();
    let rep = taylor_moment_orthogonality(&d, 4, &w, &MomentOptions::default()).unwrap();
    assert!(rep.rows.iter().all(|r| r.vanishes), "{:?}", rep.rows);
}

#[test]
fn perturbed_sphere_inversion_reconstructs_one() {
    let d = DomainSpec::perturbed_sphere(0.1).unwrap();
    let probes = vec![vec![0.0; 3], vec![0.2, -0.1, 0.3], vec![-0.4, 0.0, 0.1]];
    let rep = radon_inversion_check(&d, &probes, &InversionOptions::default()).unwrap();
    assert!(rep.max_reconstruction_error <= 1e-3, "{rep:?}");
}
