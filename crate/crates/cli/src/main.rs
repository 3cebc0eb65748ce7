//! `chaoswork`: work statistics of driven chaotic systems.
//!
//! Exit status is 0 on success; on failure a structured JSON error report
//! is printed to stderr and the status is nonzero.

use chaoswork::config::RunConfig;
use chaoswork::error::CliError;
use chaoswork::runner::{run, CommandKind};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

/// Environment variable supplying the default output directory.
const OUT_ENV: &str = "CHAOSWORK_OUT";

#[derive(Parser)]
#[command(
    name = "chaoswork",
    version,
    about = "Work distributions of driven chaotic systems, three independent ways",
    long_about = "Computes the probability distribution of work performed by a \
                  time-dependent drive on a thermally prepared system, via a \
                  trajectory-phase (semiclassical) estimator, classical two-point \
                  sampling, and an exact quantum reference on small models, with \
                  built-in cross-checks between them."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic function G(u) and work distribution P(W) from the
    /// trajectory-phase average over the initial Gibbs ensemble.
    Semiclassical(RunArgs),
    /// Work histogram from classical two-point sampling of driven
    /// trajectories.
    Classical(RunArgs),
    /// Exact two-point work atoms of a small quantum model.
    Quantum(RunArgs),
    /// Check `<exp(-beta W)> = exp(-beta dF)` for every applicable method.
    Jarzynski(RunArgs),
    /// Compare the estimators: L1 distances, moments, optional overlays.
    Compare(RunArgs),
    /// Sweep hbar_eff and report the L1 convergence toward the classical
    /// histogram.
    Limits(RunArgs),
}

impl Command {
    fn split(&self) -> (CommandKind, &RunArgs) {
        match self {
            Command::Semiclassical(a) => (CommandKind::Semiclassical, a),
            Command::Classical(a) => (CommandKind::Classical, a),
            Command::Quantum(a) => (CommandKind::Quantum, a),
            Command::Jarzynski(a) => (CommandKind::Jarzynski, a),
            Command::Compare(a) => (CommandKind::Compare, a),
            Command::Limits(a) => (CommandKind::Limits, a),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration; omitted fields take their defaults.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override engine.seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Override engine.n_samples.
    #[arg(long, value_name = "N")]
    samples: Option<usize>,
    /// Output directory (overrides the config file and CHAOSWORK_OUT).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Also emit SVG plots.
    #[arg(long)]
    plot: bool,
    /// Print the fully resolved configuration as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

/// Applies environment and flag overrides; precedence is config file, then
/// CHAOSWORK_OUT, then flags.
fn resolve_config(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Ok(dir) = std::env::var(OUT_ENV) {
        if !dir.is_empty() {
            cfg.output.dir = dir;
        }
    }
    if let Some(seed) = args.seed {
        cfg.engine.seed = seed;
    }
    if let Some(samples) = args.samples {
        cfg.engine.n_samples = samples;
    }
    if let Some(out) = &args.out {
        cfg.output.dir = out.display().to_string();
    }
    if args.plot {
        cfg.output.plot = true;
    }
    Ok(cfg)
}

fn real_main(cli: &Cli) -> Result<(), CliError> {
    let (kind, args) = cli.command.split();
    let cfg = resolve_config(args)?;
    if args.print_config {
        print!("{}", cfg.to_toml_string());
        return Ok(());
    }
    let manifest = run(kind, &cfg)?;
    println!(
        "{}: wrote {} artifact(s) and manifest.json to {}",
        kind.name(),
        manifest.files.len(),
        cfg.output.dir
    );
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = real_main(&cli) {
        eprintln!(
            "{}",
            serde_json::to_string_pretty(&err.to_report()).expect("error report serializes")
        );
        std::process::exit(1);
    }
}
