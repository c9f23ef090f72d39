//! `gabor-tauber`: batch front end over the library.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 failed
//! precondition, 4 numerical failure, 10 inconclusive verdict, 11 rejected
//! verdict.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::TheoremChoice;
use gabor_tauber::GaborError;

#[derive(Debug, Parser)]
#[command(name = "gabor-tauber", version, about = "Gabor frames and Tauberian tests for shift asymptotics")]
pub struct Cli {
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` of the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for the parallel stages.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed of the random frame-bound probes.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Run on lattices the density test rejects.
    #[arg(long, global = true)]
    pub force: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lattice STFT coefficients as a grid CSV with sidecar.
    Stft,
    /// Canonical dual window and frame bounds.
    Dual,
    /// Frame-bound estimate only.
    FrameBounds,
    /// Dual-window reconstruction error of the configured signal.
    Reconstruct,
    /// Growth class of a grid CSV.
    Classify,
    /// Convergence of a net of coefficient grids.
    NetConverge,
    /// Tauberian analysis of the signal against the comparison function.
    Analyze {
        #[arg(long, value_enum)]
        theorem: Option<TheoremChoice>,
    },
    /// Non-vanishing test of the shifted window transform.
    WienerCheck,
}

/// Process outcome besides plain success.
#[derive(Debug)]
pub enum Outcome {
    Ok,
    Inconclusive,
    Rejected,
}

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_PRECONDITION: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;
pub const EXIT_INCONCLUSIVE: u8 = 10;
pub const EXIT_REJECTED: u8 = 11;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<GaborError>().map(GaborError::root) {
        Some(
            GaborError::Config(_)
            | GaborError::Parse { .. }
            | GaborError::Usage(_)
            | GaborError::LatticeMismatch(_)
            | GaborError::Io(_),
        ) => EXIT_CONFIG,
        Some(GaborError::Precondition(_) | GaborError::Capability(_)) => EXIT_PRECONDITION,
        Some(_) => EXIT_NUMERIC,
        None => EXIT_CONFIG,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Inconclusive) => ExitCode::from(EXIT_INCONCLUSIVE),
        Ok(Outcome::Rejected) => ExitCode::from(EXIT_REJECTED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
