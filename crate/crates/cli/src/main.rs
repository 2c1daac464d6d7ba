//! parosc: parametrically driven quantum oscillator, batch front end.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 I/O
//! failure. Every run writes a `manifest.json` with the resolved
//! parameters and SHA-256 digests of all output files; identical
//! invocations produce byte-identical outputs (no RNG anywhere).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod cfg;
mod commands;
mod output;

#[derive(Debug)]
pub enum CliError {
    /// Invalid flags or configuration (exit 2).
    Usage(String),
    /// Integration, quadrature or fit failure (exit 3).
    Numerical(parosc::Error),
    /// Filesystem failure (exit 4).
    Io(String),
}

impl CliError {
    fn usage_from(err: parosc::Error) -> Self {
        CliError::Usage(err.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Numerical(err) => write!(f, "{err}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

#[derive(Args, Debug)]
pub struct BaseArgs {
    /// Absolute integrator tolerance.
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Relative integrator tolerance.
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Output directory (default ".").
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML key-value configuration file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Thread count for parallel sections (default: rayon's choice).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DriveArgs {
    /// Drive amplitude, 0 <= h < 1.
    #[arg(long)]
    pub h: Option<f64>,
    /// Detuning eps_bar (drive frequency is 2 + eps_bar).
    #[arg(long, conflicts_with = "r", allow_negative_numbers = true)]
    pub eps_bar: Option<f64>,
    /// Detuning-to-amplitude ratio r = eps_bar / h (needs h > 0).
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Number of drive half-cycles.
    #[arg(long)]
    pub nu: Option<u32>,
}

/// Evolve the ground state through the drive window.
#[derive(Args, Debug)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub base: BaseArgs,
    #[command(flatten)]
    pub drive: DriveArgs,
    /// Also write a trajectory CSV with this file name (inside --out).
    #[arg(long)]
    pub trace: Option<String>,
    /// Sample count for --trace (default 1001).
    #[arg(long)]
    pub samples: Option<usize>,
}

/// Evolve, then decompose into unperturbed eigenstates.
#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub base: BaseArgs,
    #[command(flatten)]
    pub drive: DriveArgs,
    /// Initial highest eigenstate index (auto-extended while the tail
    /// exceeds the configured tolerance).
    #[arg(long)]
    pub n_max: Option<usize>,
}

/// Sweep the detuning ratio r and tabulate the observables.
#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub base: BaseArgs,
    /// Drive amplitude, 0 < h < 1.
    #[arg(long)]
    pub h: Option<f64>,
    /// Number of drive half-cycles.
    #[arg(long)]
    pub nu: Option<u32>,
    /// Lower end of the r grid (default -1).
    #[arg(long, allow_negative_numbers = true)]
    pub r_min: Option<f64>,
    /// Upper end of the r grid (default 1).
    #[arg(long, allow_negative_numbers = true)]
    pub r_max: Option<f64>,
    /// Number of grid points (default 201).
    #[arg(long)]
    pub r_steps: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
}

/// Classical oscillator: trajectory, Floquet growth, oracle gap.
#[derive(Args, Debug)]
pub struct ClassicalArgs {
    #[command(flatten)]
    pub base: BaseArgs,
    #[command(flatten)]
    pub drive: DriveArgs,
    /// Initial position (default 1).
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    /// Initial velocity (default 0).
    #[arg(long, allow_negative_numbers = true)]
    pub v0: Option<f64>,
    /// Trajectory sample count (default 1001).
    #[arg(long)]
    pub samples: Option<usize>,
}

/// Fit the excitation spectrum of an evolved state.
#[derive(Args, Debug)]
pub struct FitArgs {
    #[command(flatten)]
    pub base: BaseArgs,
    #[command(flatten)]
    pub drive: DriveArgs,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// power-law | exponential | auto (by the resonance condition).
    #[arg(long)]
    pub model: Option<String>,
    /// First even index of the fit window.
    #[arg(long)]
    pub fit_n_min: Option<usize>,
    /// Last even index of the fit window.
    #[arg(long)]
    pub fit_n_max: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    Evolve(EvolveArgs),
    Spectrum(SpectrumArgs),
    Sweep(SweepArgs),
    Classical(ClassicalArgs),
    Fit(FitArgs),
}

#[derive(Parser, Debug)]
#[command(
    name = "parosc",
    version,
    about = "Quantum harmonic oscillator under a parametric frequency drive"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Evolve(args) => commands::cmd_evolve(args),
        Command::Spectrum(args) => commands::cmd_spectrum(args),
        Command::Sweep(args) => commands::cmd_sweep(args),
        Command::Classical(args) => commands::cmd_classical(args),
        Command::Fit(args) => commands::cmd_fit(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("parosc: error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
