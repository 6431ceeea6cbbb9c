#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use backreact::Error;
use config::{ConfigError, RunConfig};
use output::{Format, Sink};

/// Stability and linear evolution of a scalar field with one-loop
/// back-reaction.
#[derive(Parser, Debug)]
#[command(name = "backreact", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override a configuration entry, e.g. `--set params.g1=2` or
    /// `--set evolve.mode=ivp`. Repeatable; applied in order.
    #[arg(long = "set", value_name = "PATH=VALUE", global = true)]
    overrides: Vec<String>,

    /// Directory for output files. Without it the main result goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Format of tabular output.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: Format,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Tabulate the cut function on the real axis or a complex rectangle.
    Fa,
    /// Zeros of S, stability class and a dense-scan cross-check.
    Roots,
    /// Sourced, initial-value or runaway evolution (see `evolve.mode`).
    Evolve,
    /// Cosmological parameter mapping and regime report.
    Cosmo,
    /// Stability class over a one- or two-parameter grid.
    Scan,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Fa => "fa",
            Command::Roots => "roots",
            Command::Evolve => "evolve",
            Command::Cosmo => "cosmo",
            Command::Scan => "scan",
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = RunConfig::load(cli.config.as_deref(), &cli.overrides)?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(ConfigError("--threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let sink = Sink::new(cli.out.clone(), cli.format, cli.command.name(), &cfg)?;
    match cli.command {
        Command::Fa => commands::fa(&cfg, &sink),
        Command::Roots => commands::roots(&cfg, &sink),
        Command::Evolve => commands::evolve(&cfg, &sink),
        Command::Cosmo => commands::cosmo(&cfg, &sink),
        Command::Scan => commands::scan(&cfg, &sink),
    }
}

/// 2: bad input, 3: numerical failure, 4: refused regime, 1: anything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Config(_) | Error::Domain(_) | Error::Resolution(_)) => 2,
        Some(Error::Degenerate(_) | Error::NonConvergence { .. } | Error::InsufficientPeaks { .. }) => 3,
        Some(Error::RefusedRegime(_)) => 4,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
