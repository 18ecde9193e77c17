// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! `multitone`: design and verify multichromatic entangling gates from a
//! TOML run configuration.
//!
//! Exit codes: 0 success, 1 I/O or numerical failure, 2 configuration error,
//! 3 unstable chain, 4 infeasible design.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] multitone::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        use multitone::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 1,
            CliError::Core(e) => match e {
                E::InvalidInput(_) | E::Domain(_) | E::DimensionMismatch { .. } | E::Serialization(_) => 2,
                E::Unstable { .. } => 3,
                E::Infeasible { .. } => 4,
                E::NonConvergence { .. } | E::Quadrature { .. } | E::Truncation { .. } | E::Io(_) => 1,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "multitone",
    version,
    about = "Multichromatic entangling-gate design for trapped-ion chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(short, long)]
    config: PathBuf,
    /// Override a config entry, e.g. `--set design.robust=true`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Args)]
struct WithScheme {
    #[command(flatten)]
    common: Common,
    /// Scheme file; defaults to `scheme.json` in the output directory.
    #[arg(short, long)]
    scheme: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Equilibrium positions, normal modes and Lamb-Dicke couplings → modes.json.
    Modes(Common),
    /// Synthesize a modulation scheme → scheme.json, design_report.json.
    Design(Common),
    /// Verify a scheme → gate_report.json, trajectories.csv.
    Verify(WithScheme),
    /// Fidelity over a drive-phase grid → scan.csv, scan.json.
    Scan(WithScheme),
    /// Project a sampled waveform onto the tone basis → scheme.json, import_report.json.
    Import(Common),
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    RunConfig::load(&common.config, &common.overrides)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Modes(c) => commands::modes(&load(&c)?),
        Command::Design(c) => commands::design(&load(&c)?),
        Command::Verify(w) => commands::verify(&load(&w.common)?, w.scheme.as_deref()),
        Command::Scan(w) => commands::scan(&load(&w.common)?, w.scheme.as_deref()),
        Command::Import(c) => commands::import(&load(&c)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
