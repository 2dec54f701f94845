//! Subcommand implementations. Each returns the files it wrote.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cutvol_core::analysis::{
    ellipsoid_certificate, fourier_polynomiality_report, radon_inversion_check, tangency_exponent, test_directions,
    CertificateOptions, FourierOptions, InversionOptions,
};
use cutvol_core::continuation::{entire_branch_to_polynomial, singular_points, track_roots, BranchOutcome};
use cutvol_core::sectioning::{cut_volume_profile, profiles_to_csv};
use cutvol_core::{AnalysisWindow, Direction, DomainSpec, SphereQuadrature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{ConfigError, RunConfig};

/// Failure of a subcommand: bad input (exit 1) or a numerical failure (exit 2).
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 1,
            RunError::Numeric(_) => 2,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "configuration error: {m}"),
            RunError::Numeric(m) => write!(f, "numeric failure: {m}"),
            RunError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

impl From<cutvol_core::Error> for RunError {
    fn from(e: cutvol_core::Error) -> Self {
        match e {
            cutvol_core::Error::InvalidArgument(_) => RunError::Config(e.to_string()),
            _ => RunError::Numeric(e.to_string()),
        }
    }
}

pub struct Ctx<'a> {
    pub cfg: &'a RunConfig,
    pub out: &'a Path,
    pub seed: u64,
}

impl Ctx<'_> {
    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, RunError> {
        let p = self.out.join(name);
        std::fs::write(&p, contents).map_err(|e| RunError::Io(format!("cannot write {}: {e}", p.display())))?;
        Ok(p)
    }
}

fn json_text(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes") + "\n"
}

fn axes(dim: usize) -> Vec<Direction> {
    (0..dim).map(|i| Direction::axis(dim, i)).collect()
}

/// Directions from `command.xi`, else spiral + axes in 3-d, else the axes.
fn directions(ctx: &Ctx, d: &DomainSpec, default_spiral: Option<usize>) -> Result<Vec<Direction>, RunError> {
    if let Some(v) = ctx.cfg.directions(d.dim())? {
        return Ok(v);
    }
    Ok(match (d.dim(), ctx.cfg.command.directions.or(default_spiral)) {
        (3, Some(n)) => test_directions(n),
        _ => axes(d.dim()),
    })
}

pub fn section(ctx: &Ctx) -> Result<Vec<PathBuf>, RunError> {
    let d = ctx.cfg.domain()?;
    let c = &ctx.cfg.command;
    let m = c.t_samples.unwrap_or(41);
    let dirs = directions(ctx, &d, None)?;
    let mut profiles = Vec::with_capacity(dirs.len());
    for xi in &dirs {
        let (a, b) = match c.t_range {
            Some([a, b]) => (a, b),
            None => {
                let s = d.support_interval(xi)?;
                (s.h_minus, s.h_plus)
            }
        };
        if !(a < b) {
            return Err(RunError::Config(format!("empty t range [{a}, {b}]")));
        }
        let grid: Vec<f64> = (0..m).map(|i| a + (b - a) * i as f64 / (m - 1) as f64).collect();
        let p = cut_volume_profile(&d, xi, &grid)?;
        p.check_invariants(1e-9)?;
        profiles.push(p);
    }
    println!("section: {} directions x {} offsets", dirs.len(), m);
    Ok(vec![ctx.write("profiles.csv", &profiles_to_csv(&profiles))?])
}

fn window_for(d: &DomainSpec, level: usize) -> Result<AnalysisWindow, RunError> {
    Ok(AnalysisWindow::from_domain(d, &SphereQuadrature::new(level)?)?)
}

pub fn fourier(ctx: &Ctx) -> Result<Vec<PathBuf>, RunError> {
    let d = ctx.cfg.domain()?;
    let c = &ctx.cfg.command;
    let k_max = c.k_max.unwrap_or(6);
    let mut opts = FourierOptions {
        quad_level: c.quad_level,
        ..Default::default()
    };
    if let Some(m) = c.t_samples {
        opts.t_samples = m;
    }
    if let Some(t) = c.tol {
        opts.tol = t;
    }
    let window = window_for(&d, opts.quad_level.unwrap_or(FourierOptions::default_level(k_max)).max(1))?;
    let rep = fourier_polynomiality_report(&d, k_max, &window, &opts)?;
    let passed = rep.rows.iter().filter(|r| r.pass).count();
    println!(
        "fourier: {passed}/{} coefficients polynomial (epsilon {:.6}, quadrature level {})",
        rep.rows.len(),
        window.epsilon,
        rep.quad_level
    );
    if let Some(w) = rep.worst() {
        println!(
            "worst: k={} alpha={} residual/threshold {:.3e}",
            w.index.k,
            w.index.alpha,
            w.ratio()
        );
    }
    Ok(vec![
        ctx.write("fourier.csv", &rep.to_csv())?,
        ctx.write("expansion.csv", &rep.expansion.to_csv())?,
    ])
}

/// Interior probes: random domain points pulled halfway towards the center.
fn random_probes(d: &DomainSpec, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = d.center().to_vec();
    let r = d.bounding_radius();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = c.iter().map(|ci| ci + rng.gen_range(-r..r)).collect();
        if d.contains(&x) {
            out.push(c.iter().zip(&x).map(|(ci, xi)| ci + 0.5 * (xi - ci)).collect());
        }
    }
    out
}

pub fn invert(ctx: &Ctx) -> Result<Vec<PathBuf>, RunError> {
    let d = ctx.cfg.domain()?;
    let c = &ctx.cfg.command;
    let probes = match &c.probe_points {
        Some(p) => p.clone(),
        None => random_probes(&d, c.probes.unwrap_or(8), ctx.seed),
    };
    let mut opts = InversionOptions::default();
    if let Some(l) = c.quad_level {
        opts.quad_level = l;
    }
    let rep = radon_inversion_check(&d, &probes, &opts)?;
    println!(
        "invert: {} probes, max |reconstruction - 1| = {:.3e}, max |identity| = {:.3e}",
        rep.probes.len(),
        rep.max_reconstruction_error,
        rep.max_identity
    );
    let text = serde_json::to_string_pretty(&rep).expect("report serializes") + "\n";
    Ok(vec![ctx.write("inversion.json", &text)?])
}

pub fn exponent(ctx: &Ctx) -> Result<Vec<PathBuf>, RunError> {
    let d = ctx.cfg.domain()?;
    let dirs = directions(ctx, &d, None)?;
    let mut csv = String::new();
    for i in 0..d.dim() {
        let _ = write!(csv, "xi_{},", i + 1);
    }
    csv.push_str("exponent\n");
    for xi in &dirs {
        let g = tangency_exponent(&d, xi)?;
        for x in xi.components() {
            let _ = write!(csv, "{x:.16e},");
        }
        let _ = writeln!(csv, "{g:.16e}");
        println!("exponent {:?}: {g:.6}", xi.components());
    }
    Ok(vec![ctx.write("exponents.csv", &csv)?])
}

fn cjson(z: cutvol_core::Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

pub fn continuation(ctx: &Ctx) -> Result<Vec<PathBuf>, RunError> {
    let q = ctx.cfg.bipoly()?;
    let path = ctx.cfg.path()?;
    let tol = ctx.cfg.command.tol.unwrap_or(1e-10);
    let sing = singular_points(&q)?;
    let trace = track_roots(&q, &path, tol)?;
    let mut summary = json!({
        "singular_points": sing.points.iter().map(|&z| cjson(z)).collect::<Vec<_>>(),
        "enclosing_radius": sing.enclosing_radius,
        "start_roots": trace.start_roots().iter().map(|&z| cjson(z)).collect::<Vec<_>>(),
        "end_roots": trace.end_roots().iter().map(|&z| cjson(z)).collect::<Vec<_>>(),
        "steps": trace.steps.len(),
    });
    match &trace.permutation {
        Some(p) => {
            println!("monodromy: {p}");
            summary["permutation"] = json!(p.to_string());
            summary["cycle_type"] = json!(p.cycle_type());
        }
        None => println!("open path: {} steps", trace.steps.len()),
    }
    if let Some((z0, w0, r)) = ctx.cfg.germ() {
        let r = r.unwrap_or(sing.enclosing_radius);
        let b = match entire_branch_to_polynomial(&q, z0, w0, r)? {
            BranchOutcome::Polynomial {
                poly,
                residual,
                degree_used,
                samples,
            } => json!({
                "outcome": "polynomial",
                "coefficients": (0..=poly.degree()).map(|i| cjson(poly.coeff(i))).collect::<Vec<_>>(),
                "residual": residual,
                "degree_used": degree_used,
                "samples": samples,
            }),
            BranchOutcome::Ramified { stage, permutation } => json!({
                "outcome": "ramified",
                "stage": stage,
                "permutation": permutation.to_string(),
            }),
            BranchOutcome::NotPolynomial { residual, threshold } => json!({
                "outcome": "not_polynomial",
                "residual": residual,
                "threshold": threshold,
            }),
        };
        println!("branch: {}", b["outcome"].as_str().unwrap_or_default());
        summary["branch"] = b;
    }
    Ok(vec![
        ctx.write("trace.csv", &trace.to_csv())?,
        ctx.write("continuation.json", &json_text(&summary))?,
    ])
}

pub fn certify(ctx: &Ctx) -> Result<Vec<PathBuf>, RunError> {
    let d = ctx.cfg.domain()?;
    let c = &ctx.cfg.command;
    let mut opts = CertificateOptions::default();
    if let Some(n) = c.directions {
        opts.directions = n;
    }
    if let Some(k) = c.k_max {
        opts.k_max = k;
    }
    if let Some(m) = c.t_samples {
        opts.t_samples = m;
        opts.fourier.t_samples = m;
    }
    if let Some(t) = c.tol {
        opts.tol = t;
        opts.fourier.tol = t;
    }
    if c.quad_level.is_some() {
        opts.fourier.quad_level = c.quad_level;
    }
    let rep = ellipsoid_certificate(&d, &opts)?;
    let text = rep.to_text();
    print!("{text}");
    Ok(vec![
        ctx.write("certificate.json", &rep.to_json())?,
        ctx.write("certificate.txt", &text)?,
    ])
}
