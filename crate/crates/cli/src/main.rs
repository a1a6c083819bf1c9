mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use commands::Outcome;
use config::{Common, Extra, RunConfig};

/// Helmholtz eigenvalues of deformed spherical cavities by boundary perturbation theory.
#[derive(Debug, Parser)]
#[command(name = "helmpert", version, about)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ModeArgs {
    /// Mode as n,l,m.
    #[arg(long, allow_hyphen_values = true)]
    mode: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Axial harmonic coefficients C_a of the boundary.
    Coeffs {
        /// Comma-separated truncation orders to tabulate.
        #[arg(long, value_delimiter = ',')]
        sweep: Vec<usize>,
    },
    /// Lowest energy levels.
    Spectrum,
    /// Percent errors against a reference table.
    Compare {
        /// Reference CSV (header with ns/value or ps column).
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Largest acceptable unflagged percent error.
        #[arg(long)]
        gate: Option<f64>,
        /// Reference column: ns or ps.
        #[arg(long)]
        column: Option<String>,
    },
    /// Sample the perturbed wavefunction on a grid.
    Wavefunction {
        #[command(flatten)]
        mode: ModeArgs,
        /// Perturbation order 0, 1 or 2.
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=2))]
        order: Option<u8>,
        /// Grid counts NR,NTHETA,NPHI.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Internal consistency checks for one mode.
    Diagnostics {
        #[command(flatten)]
        mode: ModeArgs,
    },
}

fn run(cli: &Cli) -> Result<Outcome> {
    let mut extra = Extra::default();
    match &cli.command {
        Command::Compare { reference, gate, column } => {
            extra.reference = reference.clone();
            extra.gate = *gate;
            extra.column = column.clone();
        }
        Command::Wavefunction { mode, order, grid } => {
            extra.mode = mode.mode.clone();
            extra.order = *order;
            extra.grid = grid.clone();
        }
        Command::Diagnostics { mode } => extra.mode = mode.mode.clone(),
        Command::Coeffs { .. } | Command::Spectrum => {}
    }
    let cfg = RunConfig::resolve(&cli.common, &extra)?;
    let outcome = match &cli.command {
        Command::Coeffs { sweep } => commands::coeffs(&cfg, sweep)?,
        Command::Spectrum => commands::spectrum(&cfg)?,
        Command::Compare { .. } => commands::compare(&cfg)?,
        Command::Wavefunction { .. } => commands::wavefunction(&cfg)?,
        Command::Diagnostics { .. } => commands::diagnostics(&cfg)?,
    };
    match &cfg.out {
        Some(p) => std::fs::write(p, &outcome.text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().lock().write_all(outcome.text.as_bytes())?,
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => {
            if let Some(n) = &o.note {
                eprintln!("{n}");
            }
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
