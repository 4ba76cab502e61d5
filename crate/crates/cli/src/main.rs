use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use virial_bounds_cli::config::{self, Format, Overrides};
use virial_bounds_cli::{execute, exit_code, Mode};

/// Convergence-radius lower bounds for the Mayer and virial series of a
/// classical gas with a radial pair potential.
#[derive(Parser)]
#[command(version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    args: Args,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every beta and write a JSON report (the default).
    Run(Args),
    /// Evaluate a beta grid of at least two values and write a CSV table.
    Sweep(Args),
}

#[derive(clap::Args, Clone, Default)]
struct Args {
    /// TOML configuration file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration: lj-reference, hard-sphere or square-well.
    #[arg(long)]
    preset: Option<String>,
    /// Comma-separated inverse temperatures, replacing the configured grid.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    beta: Option<Vec<f64>>,
    /// Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Quadrature tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Compute c2, c3, b2, b3 and check them against every bound.
    #[arg(long)]
    oracle: bool,
}

fn load(args: &Args) -> Result<config::RunConfig> {
    let file = match (&args.config, &args.preset) {
        (Some(path), _) => config::load_file(path)?,
        (None, Some(name)) => config::parse(config::preset(name)?).with_context(|| format!("preset {name}"))?,
        (None, None) => bail!("either --config or --preset is required"),
    };
    let overrides = Overrides {
        beta: args.beta.clone(),
        seed: args.seed,
        tol: args.tol,
        out: args.out.clone(),
        format: args.format,
        oracle: args.oracle,
    };
    file.resolve(&overrides)
}

fn run(mode: Mode, args: &Args) -> Result<()> {
    let cfg = load(args)?;
    let (body, summary) = execute(&cfg, mode)?;
    for line in summary {
        eprintln!("{line}");
    }
    match &cfg.out {
        Some(path) => std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{body}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Some(Command::Run(a)) => (Mode::Run, a),
        Some(Command::Sweep(a)) => (Mode::Sweep, a),
        None => (Mode::Run, cli.args),
    };
    match run(mode, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
