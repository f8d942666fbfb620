//! `stokes-hs`: kernels, resolvent, time evolution and checks for one Fourier mode
//! of the Stokes vorticity problem on a periodic half-space.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "stokes-hs", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the time-domain Green matrix on a (y, z) grid.
    Kernel(Flags),
    /// Apply the resolvent to seeded smooth data.
    Resolvent(Flags),
    /// Evolve seeded initial data by the Duhamel formula.
    Solve(Flags),
    /// Run the numerical checks and write a JSON report.
    Verify(Flags),
    /// Biot-Savart roundtrip and trace identities on a seeded solenoidal field.
    BiotSavart(Flags),
}

#[derive(Debug, clap::Args)]
struct Flags {
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    run: RunConfig,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl From<stokes_halfspace::Error> for CliError {
    fn from(e: stokes_halfspace::Error) -> Self {
        if e.is_config_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("output: {e}"))
    }
}

fn resolve(flags: Flags) -> Result<RunConfig, CliError> {
    match &flags.config {
        Some(path) => Ok(flags.run.over(RunConfig::from_file(path)?)),
        None => Ok(flags.run),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Kernel(f) => commands::kernel(&resolve(f)?),
        Command::Resolvent(f) => commands::resolvent(&resolve(f)?),
        Command::Solve(f) => commands::solve(&resolve(f)?),
        Command::Verify(f) => commands::verify(&resolve(f)?),
        Command::BiotSavart(f) => commands::biot_savart(&resolve(f)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
