//! `twomode`: simulate the merging of two condensates in the two-mode model.

mod commands;
mod config;
mod plot;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Overrides, RunConfig, Scenario};

#[derive(Debug)]
pub enum CliError {
    /// Bad input or unusable output path (exit code 2).
    Config(String),
    /// Propagation or eigensolver failure (exit code 3).
    Numerical(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn from_core(e: twomode_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }

    pub fn from_csv(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "twomode", version, about = "Merging of two Bose-Einstein condensates in the two-mode model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one merge and write its trajectory.
    Merge(Overrides),
    /// Eigenvalue spectrum of U S_z^2 - J S_x over a J/U grid.
    Spectrum(Overrides),
    /// Final condensate fraction for a list of merge times.
    Sweep(Overrides),
    /// Radial and axial merges side by side.
    Compare(Overrides),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (scenario, overrides) = match &cli.command {
        Command::Merge(o) => (Scenario::Merge, o),
        Command::Spectrum(o) => (Scenario::Spectrum, o),
        Command::Sweep(o) => (Scenario::Sweep, o),
        Command::Compare(o) => (Scenario::Compare, o),
    };
    let config = RunConfig::resolve(scenario, overrides)?;
    match scenario {
        Scenario::Merge => commands::run_merge(&config),
        Scenario::Spectrum => commands::run_spectrum(&config),
        Scenario::Sweep => commands::run_sweep(&config),
        Scenario::Compare => commands::run_compare(&config),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("twomode: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
