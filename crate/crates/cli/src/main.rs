//! `ptsim` — deterministic CSV driver for the passive PT-symmetry toolkit.
//!
//! Subcommands: `spectrum`, `evolve`, `order-params`, `turning-point`,
//! `experiment`. Every flag can also come from a `key = value` config file
//! (`--config`); explicit flags override the file. Exit codes: 0 success,
//! 2 configuration error, 3 numerical-domain error, 4 I/O error.

mod commands;
mod config;
mod csvio;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{GridSpec, InitialState, ObservableArg, PictureArg, RawConfig, TimesList};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(ptsim::PtError),
    Io(std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration: {msg}"),
            CliError::Numeric(e) => write!(f, "numerics: {e}"),
            CliError::Io(e) => write!(f, "io: {e}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "ptsim",
    version,
    about = "Passive PT-symmetric two-level system: spectra, dynamics, order parameters, synthetic experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by all subcommands; each command applies its own defaults to
/// the fields it uses. Frequencies are in kHz, times in µs.
#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// Rabi rate Ω in kHz (default 32)
    #[arg(long)]
    omega_khz: Option<f64>,
    /// Loss rate γ in kHz
    #[arg(long)]
    gamma_khz: Option<f64>,
    /// Loss-rate grid in kHz as start:stop:count
    #[arg(long)]
    gamma_grid: Option<GridSpec>,
    /// Trajectory horizon in µs
    #[arg(long)]
    t_max_us: Option<f64>,
    /// Number of samples (trajectory points, sweep averaging points, or
    /// experiment data points, depending on the command)
    #[arg(long)]
    n_samples: Option<usize>,
    /// Integrator step in µs (default: Rabi period / 1000, clamped by decay)
    #[arg(long)]
    dt_us: Option<f64>,
    /// Initial state: ket0, ket1 or re0,im0,re1,im1
    #[arg(long)]
    initial_state: Option<InitialState>,
    /// PRNG seed for shot synthesis
    #[arg(long)]
    seed: Option<u64>,
    /// Shots per data point; 0 selects the noiseless sentinel
    #[arg(long)]
    n_shots: Option<u64>,
    /// 2-level non-Hermitian or 3-level Lindblad propagation
    #[arg(long)]
    levels: Option<usize>,
    /// Picture(s) to emit: lossy, pt or both
    #[arg(long)]
    picture: Option<PictureArg>,
    /// Comma-separated evaluation times in µs (turning-point)
    #[arg(long)]
    times_us: Option<TimesList>,
    /// Readout observable: p0 or sy
    #[arg(long)]
    observable: Option<ObservableArg>,
    /// Output CSV path (commands with several outputs derive suffixed names)
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// key = value config file; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonArgs {
    fn resolve(self) -> Result<RawConfig, CliError> {
        let flags = RawConfig {
            omega_khz: self.omega_khz,
            gamma_khz: self.gamma_khz,
            gamma_grid: self.gamma_grid,
            t_max_us: self.t_max_us,
            n_samples: self.n_samples,
            dt_us: self.dt_us,
            initial_state: self.initial_state,
            seed: self.seed,
            n_shots: self.n_shots,
            levels: self.levels,
            picture: self.picture,
            times_us: self.times_us,
            observable: self.observable,
            output: self.output,
        };
        match &self.config {
            Some(path) => Ok(RawConfig::from_file(path)?.overlay(flags)),
            None => Ok(flags),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of H_PT, H_eff and the Liouvillian across a loss sweep
    Spectrum(CommonArgs),
    /// Trajectory of the dissipative system with a cross-checked reference
    Evolve(CommonArgs),
    /// Order parameters Σ_Z and Σ_Y, analytic and numeric, across a sweep
    OrderParams(CommonArgs),
    /// Fixed-time population versus loss rate, with its minimizing γ
    TurningPoint(CommonArgs),
    /// Synthesize shot data, fit γ, and rescale into the PT picture
    Experiment(CommonArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Spectrum(args) => commands::cmd_spectrum(args.resolve()?),
        Command::Evolve(args) => commands::cmd_evolve(args.resolve()?),
        Command::OrderParams(args) => commands::cmd_order_params(args.resolve()?),
        Command::TurningPoint(args) => commands::cmd_turning_point(args.resolve()?),
        Command::Experiment(args) => commands::cmd_experiment(args.resolve()?),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
