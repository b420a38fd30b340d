mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gkpkit::GkpError;

#[derive(Parser, Debug)]
#[command(name = "gkpkit", version, about = "Approximate GKP code states via theta functions")]
pub struct Cli {
    /// Series truncation tolerance; for `selftest` it replaces every pass threshold.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Maximum number of series terms per side.
    #[arg(long, global = true)]
    pub max_terms: Option<usize>,

    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,

    /// Output format; defaults to csv for data and json for convert and selftest.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print every equivalent parametrization of a code state.
    Convert(StateArgs),
    /// Sample the position or momentum wave function.
    Wavefunction(WavefunctionArgs),
    /// Sample the Wigner function of |j><j'| on a grid.
    Wigner(WignerArgs),
    /// Sweep an observable of the symmetric code over the squeezing level.
    Sweep(SweepArgs),
    /// Run the cross-route and oracle checks.
    Selftest(SelftestArgs),
}

/// State description: exactly one of the parametrization flags plus its values.
#[derive(Args, Debug, Clone)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["approx1", "approx2", "approx3", "symmetric", "standard"])))]
pub struct StateArgs {
    /// Approximation 1: `--kappa`, `--squeeze-width` [, `--alpha`].
    #[arg(long)]
    pub approx1: bool,
    /// Approximation 2: `--gamma`, `--delta` [, `--alpha`].
    #[arg(long)]
    pub approx2: bool,
    /// Approximation 3: `--beta` [, `--alpha`].
    #[arg(long)]
    pub approx3: bool,
    /// Symmetric code: `--sigma2` or `--db`.
    #[arg(long)]
    pub symmetric: bool,
    /// Standard form: `--sigma-q2`, `--sigma-p2`, `--gamma-spacing`.
    #[arg(long)]
    pub standard: bool,

    #[arg(long)]
    pub kappa: Option<f64>,
    /// Spike width Delta of Approximation 1.
    #[arg(long)]
    pub squeeze_width: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Lattice constant; defaults to sqrt(2 pi / d).
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// Squeezing level -10 log10(2 sigma^2).
    #[arg(long, conflicts_with = "sigma2")]
    pub db: Option<f64>,
    #[arg(long)]
    pub sigma_q2: Option<f64>,
    #[arg(long)]
    pub sigma_p2: Option<f64>,
    #[arg(long)]
    pub gamma_spacing: Option<f64>,

    /// Logical dimension.
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Logical index.
    #[arg(long, default_value_t = 0)]
    pub j: u32,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Basis {
    Position,
    Momentum,
}

#[derive(Args, Debug)]
pub struct WavefunctionArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_enum, default_value_t = Basis::Position)]
    pub basis: Basis,
    /// Lower end of the sampled interval; defaults to -3 Gamma.
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    /// Upper end of the sampled interval; defaults to 3 Gamma.
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    #[arg(long, default_value_t = 601)]
    pub points: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Theta,
    Comb,
    Riemann,
}

#[derive(Args, Debug)]
pub struct WignerArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Index of the bra; defaults to `--j`.
    #[arg(long)]
    pub j_prime: Option<u32>,
    /// Grid bounds; each defaults to +-2 Gamma.
    #[arg(long, allow_hyphen_values = true)]
    pub q_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub q_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p_max: Option<f64>,
    #[arg(long, default_value_t = 201)]
    pub nq: usize,
    #[arg(long, default_value_t = 201)]
    pub np: usize,
    #[arg(long, value_enum, default_value_t = RouteArg::Theta)]
    pub route: RouteArg,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    Overlap,
    Photon,
    Normalization,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, default_value_t = 0)]
    pub j: u32,
    /// Second index for overlap sweeps.
    #[arg(long, default_value_t = 1)]
    pub j_prime: u32,
    #[arg(long)]
    pub db_min: f64,
    #[arg(long)]
    pub db_max: f64,
    /// Number of sweep points, endpoints included.
    #[arg(long)]
    pub db_steps: usize,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Restrict to groups: theta, params, reps, wigner, observables.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
}

/// Exit codes: 0 success, 1 self-test failure, 2 invalid input, 3 I/O failure.
pub enum Failure {
    Selftest,
    Invalid(String),
    Io(std::io::Error),
}

impl From<GkpError> for Failure {
    fn from(e: GkpError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("GKPKIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Selftest) => ExitCode::from(1),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
