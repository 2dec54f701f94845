use std::path::Path;
use std::process::{Command, Output};

fn cutvol(args: &[&str], config: &str, out: &Path) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_cutvol"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

const BALL: &str = r#"{"domain": {"dimension": 3, "type": "ball", "radius": 1.5, "center": [0.1, 0, 0]},
                       "command": {"t_samples": 11}}"#;

#[test]
fn section_writes_profiles() {
    let out = tempfile::tempdir().unwrap();
    let o = cutvol(&["section"], BALL, out.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.path().join("profiles.csv")).unwrap();
    // three axes x 11 offsets + header
    assert_eq!(csv.lines().count(), 34);
}

#[test]
fn section_output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(cutvol(&["section", "--threads", "1"], BALL, a.path()).status.success());
    assert!(cutvol(&["section", "--threads", "2"], BALL, b.path()).status.success());
    let x = std::fs::read(a.path().join("profiles.csv")).unwrap();
    let y = std::fs::read(b.path().join("profiles.csv")).unwrap();
    assert_eq!(x, y);
}

#[test]
fn bad_config_exits_with_one() {
    let out = tempfile::tempdir().unwrap();
    let o = cutvol(&["section"], r#"{"domain": {"dimension": 3, "type": "cube"}}"#, out.path());
    assert_eq!(o.status.code(), Some(1));
    let o = cutvol(&["fourier"], r#"{"domain": {"dimension": 3, "type": "ball"}, "command": {"k_max": 40}}"#, out.path());
    assert_eq!(o.status.code(), Some(1));
    let o = cutvol(&["section"], "not json", out.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn numeric_failure_exits_with_two() {
    // Q = (w - z)^2 has a repeated factor, so its discriminant vanishes identically.
    let cfg = r#"{"command": {"bipoly": [[[0,0],[0,0],[1,0]], [[0,0],[-2,0]], [[1,0]]],
                             "path": {"type": "circle", "center": [0,0], "radius": 1}}}"#;
    let out = tempfile::tempdir().unwrap();
    let o = cutvol(&["continue"], cfg, out.path());
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn continue_reports_square_root_monodromy() {
    // w^2 - z around the unit circle swaps the two roots.
    let cfg = r#"{"command": {"bipoly": [[[0,0],[-1,0]], [], [[1,0]]],
                             "path": {"type": "circle", "center": [0,0], "radius": 1},
                             "germ": {"z": [0.5, 0], "w": [0.7071067811865476, 0]}}}"#;
    let out = tempfile::tempdir().unwrap();
    let o = cutvol(&["continue"], cfg, out.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("monodromy: (1 2)"), "{stdout}");
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("continuation.json")).unwrap()).unwrap();
    assert_eq!(v["permutation"], "(1 2)");
    assert_eq!(v["branch"]["outcome"], "ramified");
    assert!(out.path().join("trace.csv").exists());
}

#[test]
fn exponent_of_ball_is_two() {
    let out = tempfile::tempdir().unwrap();
    let o = cutvol(&["exponent"], BALL, out.path());
    assert!(o.status.success());
    let csv = std::fs::read_to_string(out.path().join("exponents.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let g: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((g - 2.0).abs() < 0.05, "{line}");
    }
}

#[test]
fn invert_uses_seeded_probes() {
    let cfg = r#"{"domain": {"dimension": 3, "type": "ball"}, "command": {"probes": 3, "quad_level": 8}, "seed": 11}"#;
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(cutvol(&["invert"], cfg, a.path()).status.success());
    assert!(cutvol(&["invert"], cfg, b.path()).status.success());
    let x = std::fs::read_to_string(a.path().join("inversion.json")).unwrap();
    assert_eq!(x, std::fs::read_to_string(b.path().join("inversion.json")).unwrap());
    let v: serde_json::Value = serde_json::from_str(&x).unwrap();
    assert!(v["max_reconstruction_error"].as_f64().unwrap() < 1e-8);
}

#[test]
fn fourier_on_ball_passes() {
    let cfg = r#"{"domain": {"dimension": 3, "type": "ball"}, "command": {"k_max": 2}}"#;
    let out = tempfile::tempdir().unwrap();
    let o = cutvol(&["fourier"], cfg, out.path());
    assert!(o.status.success());
    let csv = std::fs::read_to_string(out.path().join("fourier.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 9);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}
