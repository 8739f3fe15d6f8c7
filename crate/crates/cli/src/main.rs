//! `diskdyn <command> --config <path> [--out <path>]`
//!
//! Commands: preimages, shadow, verify, render. Exit codes: 0 ok,
//! 2 config error, 3 numeric/capacity error, 4 property violation,
//! 5 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;

use commands::{cmd_preimages, cmd_render, cmd_shadow, cmd_verify, CliError};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "diskdyn", about = "Disk-model dynamics of attracting basins")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Preimage tree of a base point as CSV.
    Preimages(RunArgs),
    /// Nearest-preimage shadowing report over a sample grid.
    Shadow(RunArgs),
    /// Boundary derivative, expanding annulus and density checks.
    Verify(RunArgs),
    /// Basin raster as a binary PPM image.
    Render(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(args: &RunArgs, expected: &str) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::config(format!("{}: {e}", args.config.display())))?;
    let config = RunConfig::parse(&text).map_err(CliError::config)?;
    if let Some(name) = &config.command {
        if name != expected {
            return Err(CliError::config(format!(
                "config names command {name:?} but {expected:?} was invoked"
            )));
        }
    }
    Ok(config)
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Preimages(args) => cmd_preimages(&load(args, "preimages")?, args.out.as_ref()),
        Command::Shadow(args) => cmd_shadow(&load(args, "shadow")?, args.out.as_ref()),
        Command::Verify(args) => cmd_verify(&load(args, "verify")?, args.out.as_ref()),
        Command::Render(args) => cmd_render(&load(args, "render")?, args.out.as_ref()),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
