//! `cutvol`: cut-volume analyses driven by a JSON config.
//!
//! Exit codes: 0 on success (a failing certificate is still a success),
//! 1 for bad configuration or unwritable output, 2 for numerical failures.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Ctx, RunError};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "cutvol", version, about = "Cut volumes, sections and their algebraic structure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config with `domain`, `command`, `seed` and `threads` blocks.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads; overrides the config.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// RNG seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Cut-volume and section-area profiles.
    Section,
    /// Spherical-harmonic coefficients of the cut volume and their polynomiality.
    Fourier,
    /// Radon inversion and the order-5 identity at interior probes.
    Invert,
    /// Tangency exponent of the tail volume at the support.
    Exponent,
    /// Root tracking, monodromy and the entire-branch check for Q(z, w) = 0.
    Continue,
    /// Ellipsoid certificate.
    Certify,
}

fn run(cli: &Cli) -> Result<(), RunError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| RunError::Config("--config is required".into()))?;
    let cfg = RunConfig::load(path)?;
    let threads = cli.threads.or(cfg.threads).unwrap_or(1);
    if threads == 0 {
        return Err(RunError::Config("threads must be >= 1".into()));
    }
    // Results do not depend on the thread count; a second init is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    std::fs::create_dir_all(&cli.out)
        .map_err(|e| RunError::Io(format!("cannot create {}: {e}", cli.out.display())))?;
    let ctx = Ctx {
        cfg: &cfg,
        out: &cli.out,
        seed: cli.seed.or(cfg.seed).unwrap_or(0),
    };
    let written = match cli.command {
        Command::Section => commands::section(&ctx),
        Command::Fourier => commands::fourier(&ctx),
        Command::Invert => commands::invert(&ctx),
        Command::Exponent => commands::exponent(&ctx),
        Command::Continue => commands::continuation(&ctx),
        Command::Certify => commands::certify(&ctx),
    }?;
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
