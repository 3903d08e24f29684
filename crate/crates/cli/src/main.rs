//! `hetnet-meta`: moments and meta distribution of the downlink SIR for a
//! scenario file, analytic or simulated.

mod commands;
mod output;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Failure classes, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("accuracy failure: {0}")]
    Accuracy(String),
    #[error("degenerate moments: {0}")]
    Degenerate(String),
    #[error("comparison failed for {0}")]
    CompareFailed(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Accuracy(_) => 3,
            CliError::Degenerate(_) => 4,
            CliError::CompareFailed(_) => 5,
        }
    }
}

impl From<hetnet_meta::Error> for CliError {
    fn from(e: hetnet_meta::Error) -> Self {
        use hetnet_meta::Error as E;
        match e {
            E::InvalidModel(_)
            | E::InvalidParameter(_)
            | E::Domain { .. }
            | E::EmptyRealization => CliError::Config(e.to_string()),
            E::Degenerate { .. } => CliError::Degenerate(e.to_string()),
            E::Accuracy { .. }
            | E::SeriesNonConvergence { .. }
            | E::GilPelaezTail { .. }
            | E::Range { .. } => CliError::Accuracy(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hetnet-meta",
    version,
    about = "SIR meta distribution of PPP/PCP heterogeneous cellular networks"
)]
pub struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Write the main table here instead of stdout; secondary tables go to
    /// sibling files (`<out>.beta.csv`, `<out>.moments.csv`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Print the parsed scenario in canonical form and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic moments M_b(β).
    Moments {
        #[command(flatten)]
        betas: BetaArgs,
        /// Real moment orders b.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            default_value = "1,2"
        )]
        orders: Vec<f64>,
    },
    /// Analytic meta distribution F̄(β, θ).
    Meta {
        #[command(flatten)]
        betas: BetaArgs,
        #[command(flatten)]
        grid: ThetaArgs,
        #[arg(long, value_enum, default_value_t = Method::Beta)]
        method: Method,
        /// Emit the uniform kernel θ₁ = θ₂ = 1 instead of evaluating the model.
        #[arg(long)]
        self_test_uniform: bool,
    },
    /// Monte Carlo meta distribution and moments.
    Simulate {
        #[command(flatten)]
        betas: BetaArgs,
        #[command(flatten)]
        grid: ThetaArgs,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Analytic M₁, M₂ against simulation, 3-standard-error criterion.
    Compare {
        #[command(flatten)]
        betas: BetaArgs,
        #[command(flatten)]
        sim: SimArgs,
        /// Path-loss exponent used by the simulation only (negative control).
        #[arg(long)]
        sim_alpha: Option<f64>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct BetaArgs {
    /// SIR thresholds in dB, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0"
    )]
    pub beta_db: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ThetaArgs {
    /// Either N (θ = 1/N, 2/N, …, 1) or a comma-separated list of θ values.
    #[arg(long, default_value = "20")]
    pub theta_grid: String,
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    #[arg(long)]
    pub realizations: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sampling window radius in km.
    #[arg(long)]
    pub window_km: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Beta,
    GilPelaez,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("HETNET_META_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "HETNET_META_THREADS must be a positive integer, got {v:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| commands::run(&cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hetnet-meta: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
