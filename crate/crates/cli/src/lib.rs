//! Batch front end: `network`, `evaluate`, `simulate` and `select`.
//!
//! Exit codes: 0 on success, 1 when some evaluation cells failed (their
//! outputs are still written), 2 when inputs or settings are invalid (no
//! outputs are written).

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "netgnar", version, about = "Network autoregressive forecasting of county panels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a network and write network.json, stats.csv and degree_hist.csv
    Network(Flags),
    /// Rolling-horizon evaluation of every state × target × model
    Evaluate(Flags),
    /// Simulate a panel from known coefficients
    Simulate(Flags),
    /// Rank (alphaOrder, betaOrder) grid cells
    Select(Flags),
}

#[derive(Debug, Args)]
pub struct Flags {
    /// JSON file with the same keys as the flags; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunConfig,
}

impl Flags {
    pub fn resolve(&self) -> anyhow::Result<RunConfig> {
        let base = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        Ok(self.run.clone().over(base))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    CellFailures(usize),
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::CellFailures(_) => 1,
        }
    }
}

pub const INPUT_ERROR_EXIT: u8 = 2;

/// Runs one subcommand and writes its outputs.
pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let (flags, command): (&Flags, fn(&RunConfig) -> anyhow::Result<commands::Staged>) = match &cli.command {
        Command::Network(f) => (f, commands::network),
        Command::Evaluate(f) => (f, commands::evaluate),
        Command::Simulate(f) => (f, commands::simulate),
        Command::Select(f) => (f, commands::select),
    };
    let cfg = flags.resolve()?;
    let out = cfg.out_dir()?.to_path_buf();
    let staged = command(&cfg)?;
    for path in staged.outputs.commit(&out)? {
        log::info!("wrote {}", path.display());
    }
    Ok(match staged.failures {
        0 => Outcome::Success,
        n => Outcome::CellFailures(n),
    })
}
