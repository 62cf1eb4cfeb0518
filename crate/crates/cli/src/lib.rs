//! Command-line front end for the `tumorfb` solvers.
//!
//! Exit codes: 0 success, 2 usage error, 3 input or invariant violation,
//! 4 internal-consistency or numerical failure (including a failed `verify`).

// NaN must take the rejecting branch of negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod output;
pub mod sampling;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;
use tumorfb::ModelParams;

use crate::output::Format;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] tumorfb::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{0}")]
    VerifyFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_input_error() => EXIT_INPUT,
            CliError::Core(tumorfb::Error::DegenerateEvent(_)) => EXIT_INPUT,
            CliError::Core(_) => EXIT_INTERNAL,
            CliError::Io(_) | CliError::Input(_) => EXIT_INPUT,
            CliError::VerifyFailed(_) => EXIT_INTERNAL,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "tumorfb", version, about = "Free-boundary tumor model: stationary, dynamics, spectral and oracle checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Consumption rate λ.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Quiescent consumption fraction ε.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub eps: f64,
    /// Threshold concentration μ.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub mu: f64,
    /// Boundary concentration u_inf.
    #[arg(long = "uinf", default_value_t = 1.0, allow_negative_numbers = true)]
    pub u_inf: f64,
    /// Domain radius R.
    #[arg(long = "R", default_value_t = 1.0, allow_negative_numbers = true)]
    pub radius: f64,
    /// Mortality rate η.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub eta: f64,
}

impl ParamArgs {
    pub fn params(&self) -> CliResult<ModelParams> {
        Ok(ModelParams::new(
            self.lambda,
            self.eps,
            self.mu,
            self.u_inf,
            self.radius,
            self.eta,
        )?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All stationary solutions with free boundaries, centre values and residuals.
    Stationary {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Stationary solutions over a λ grid (the `--lambda` flag is ignored).
    Bifurcation {
        #[command(flatten)]
        params: ParamArgs,
        /// Smallest λ; defaults to 0.01·λ₁.
        #[arg(long)]
        lambda_min: Option<f64>,
        /// Largest λ; defaults to 3·λ₁.
        #[arg(long)]
        lambda_max: Option<f64>,
        /// Number of uniformly spaced grid points.
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Do not insert λ₁ and λ₂ into the grid.
        #[arg(long)]
        no_thresholds: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Integrate the radius ODE and classify its long-time behaviour.
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        /// Initial radius.
        #[arg(long = "R0", default_value_t = 1.0, allow_negative_numbers = true)]
        r0: f64,
        #[arg(long = "t-end", default_value_t = 10.0, allow_negative_numbers = true)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-8)]
        rtol: f64,
        #[arg(long, default_value_t = 0.0)]
        atol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Eigenvalues σ_l and invertibility conditions at a free boundary.
    Spectral {
        #[command(flatten)]
        params: ParamArgs,
        /// Free-boundary radius; defaults to the largest stationary free boundary.
        #[arg(long)]
        r0: Option<f64>,
        #[arg(long, default_value_t = tumorfb::spectral::DEFAULT_L_MAX)]
        l_max: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Cross-check every solver against the brute-force oracles.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Random parameter draws per check.
        #[arg(long, default_value_t = 200)]
        draws: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
