//! Command-line front end: entanglement entropies of harmonic-chain arrays
//! with collective inter-chain coupling.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

#[derive(Parser)]
#[command(
    name = "chainent",
    version,
    about = "Ground-state entanglement entropy of harmonic-chain arrays"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check that the coupling model admits a ground state in the chosen mode.
    Validate(CommonArgs),
    /// Entropy of a single block, written as a one-row CSV.
    Entropy(CommonArgs),
    /// Entropy table over a grid of block sizes.
    Sweep(CommonArgs),
    /// Fit the scaling law to a sweep CSV.
    Fit(FitArgs),
    /// Cross-check the structured path against the dense reference lattice.
    OracleCheck(CommonArgs),
    /// Normal-mode frequency window and its chain-count scaling.
    Spectrum(CommonArgs),
}

#[derive(Args)]
pub struct CommonArgs {
    /// Path to the TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Write machine-readable output to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Block anchor: corner, centered, or offset=<k>.
    #[arg(long)]
    pub placement: Option<String>,
    /// Validation mode: strict or permissive.
    #[arg(long)]
    pub mode: Option<String>,
    /// Report entropies in bits instead of nats.
    #[arg(long)]
    pub bits: bool,
    /// Sweep grid, e.g. "lx=2,4,8;ly=16,32,64".
    #[arg(long)]
    pub grid: Option<String>,
    /// Record real per-row wall times in CSV output. Off by default so that
    /// identical configs produce byte-identical files.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Args)]
pub struct FitArgs {
    /// Sweep CSV to fit (as produced by the sweep subcommand).
    pub csv: PathBuf,
    /// Write the fit report to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report fitted coefficients in bits instead of nats.
    #[arg(long)]
    pub bits: bool,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version print to stdout and are not failures; real
            // usage errors exit 1 with the message on stderr.
            let code = i32::from(err.use_stderr());
            let _ = err.print();
            std::process::exit(code);
        }
    };
    std::process::exit(commands::run(cli));
}
