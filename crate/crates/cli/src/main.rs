//! `rgarma` — reproducible, file-driven experiments connecting discrete
//! ARMA models and continuous-time linear SDEs: simulation, decimation,
//! coefficient-space flow, fixed-point classification, exact
//! discretization, and discretization-bias inference.
//!
//! Every subcommand resolves its parameters as flags > `--config` JSON >
//! defaults, writes its data payload to `--out`, and drops a
//! `<out>.manifest.json` from which the run can be reproduced.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rgarma", version, about = "ARMA coarse-graining, flow, exact SDE discretization, and inference experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a time series (ARMA update, first-order scheme, or exact transitions)
    Simulate(SimulateArgs),
    /// Coarse-grain an ARMA(p,q) model by trimming every other time point
    Decimate(DecimateArgs),
    /// Iterate the coarse-graining map on Taylor coefficients and dump the orbit
    Flow(FlowArgs),
    /// Flow an initial condition to stabilization and match fixed-point templates
    Classify(ClassifyArgs),
    /// Exact ARMA(2,1) parameters of a 2D linear SDE (with expansion and first-order comparison)
    Exactify(ExactifyArgs),
    /// Fit damping/temperature estimators on observed or generated series
    Infer(InferArgs),
    /// Quartic-potential conjecture check: fine-step simulation, subsampling, biased fit
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Arma,
    Euler,
    Exact,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IcArg {
    /// First-order scheme coefficients: psi = (2, -eta, -kappa), theta = (-1, eta), alpha_3 = sigma2
    Euler,
    /// A fixed-point template from its class and (u, s, z, b) parameters
    FixedPoint,
    /// Raw coefficient lists
    Raw,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassArg {
    A,
    B,
    C,
    D,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InferSchemeArg {
    /// Finite-difference (first-order) Gaussian likelihood
    Euler,
    /// Exact ARMA(2,1) likelihood; damping/temperature read back through the exact map
    Arma21,
    /// Finite-difference fit corrected by the 2/3 damping rescaling
    Effective,
}

#[derive(clap::Args)]
#[command(allow_negative_numbers = true)]
struct SimulateArgs {
    /// JSON config file supplying defaults; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Generating scheme
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Sampling interval
    #[arg(long)]
    tau: Option<f64>,
    /// Number of observations
    #[arg(long)]
    n: Option<usize>,
    /// Base seed; replicas derive independent substreams
    #[arg(long)]
    seed: Option<u64>,
    /// AR coefficients, comma separated (arma scheme)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    phi: Option<Vec<f64>>,
    /// MA coefficients, comma separated (arma scheme)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    nu: Option<Vec<f64>>,
    /// Innovation amplitude (arma scheme)
    #[arg(long)]
    mu: Option<f64>,
    /// Burn-in steps; defaults to ten relaxation times for stationary models
    #[arg(long)]
    burn_in: Option<usize>,
    /// Velocity damping coefficient
    #[arg(long)]
    eta: Option<f64>,
    /// Elastic constant
    #[arg(long)]
    kappa: Option<f64>,
    /// Position drag
    #[arg(long)]
    lambda: Option<f64>,
    /// Position-position diffusion entry
    #[arg(long)]
    sxx2: Option<f64>,
    /// Position-velocity diffusion entry
    #[arg(long)]
    sxv2: Option<f64>,
    /// Velocity-velocity diffusion entry
    #[arg(long)]
    svv2: Option<f64>,
    /// Initial position (exact scheme)
    #[arg(long)]
    x0: Option<f64>,
    /// Initial velocity (exact scheme)
    #[arg(long)]
    v0: Option<f64>,
    /// Output path; the manifest lands at `<out>.manifest.json`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Payload format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(clap::Args)]
#[command(allow_negative_numbers = true)]
struct DecimateArgs {
    /// JSON config file supplying defaults; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    phi: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    nu: Option<Vec<f64>>,
    #[arg(long)]
    mu: Option<f64>,
    /// Number of decimation steps to apply
    #[arg(long)]
    steps: Option<usize>,
    /// Output path; the manifest lands at `<out>.manifest.json`
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
#[command(allow_negative_numbers = true)]
struct InitialConditionArgs {
    /// Initial-condition kind
    #[arg(long, value_enum)]
    ic: Option<IcArg>,
    /// Velocity damping coefficient
    #[arg(long)]
    eta: Option<f64>,
    /// Elastic constant
    #[arg(long)]
    kappa: Option<f64>,
    /// Noise weight of the order-3 coefficient
    #[arg(long)]
    sigma2: Option<f64>,
    /// Fixed-point class (with --ic fixed-point)
    #[arg(long, value_enum)]
    class: Option<ClassArg>,
    /// Template drift parameter
    #[arg(long)]
    u: Option<f64>,
    /// Template order-1 noise parameter
    #[arg(long)]
    s: Option<f64>,
    /// Template order-2 AR parameter (class D)
    #[arg(long)]
    z: Option<f64>,
    /// Template order-3 noise parameter (class D)
    #[arg(long)]
    b: Option<f64>,
    /// Raw coefficient list, comma separated, padded to order+1
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    psi: Option<Vec<f64>>,
    /// Raw coefficient list, comma separated, padded to order+1
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Option<Vec<f64>>,
    /// Raw coefficient list, comma separated, padded to order+1
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alpha: Option<Vec<f64>>,
    /// Raw coefficient list, comma separated, padded to order+1
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    beta: Option<Vec<f64>>,
    /// Truncation order K
    #[arg(long)]
    order: Option<usize>,
}

#[derive(clap::Args)]
#[command(allow_negative_numbers = true)]
struct FlowArgs {
    /// JSON config file supplying defaults; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    ic: InitialConditionArgs,
    /// Number of map iterations
    #[arg(long)]
    iterations: Option<usize>,
    /// Output path; the manifest lands at `<out>.manifest.json`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Payload format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(clap::Args)]
#[command(allow_negative_numbers = true)]
struct ClassifyArgs {
    /// JSON config file supplying defaults; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    ic: InitialConditionArgs,
    /// Convergence tolerance of the orbit
    #[arg(long)]
    tol: Option<f64>,
    /// Sweep a grid of order-0 AR pairs instead of one point
    #[arg(long)]
    basin: bool,
    /// Grid resolution per axis of the basin sweep
    #[arg(long)]
    grid_n: Option<usize>,
    /// Basin sweep range of the order-0 coefficients
    #[arg(long)]
    psi0_min: Option<f64>,
    #[arg(long)]
    psi0_max: Option<f64>,
    #[arg(long)]
    theta0_min: Option<f64>,
    #[arg(long)]
    theta0_max: Option<f64>,
    /// Output path; the manifest lands at `<out>.manifest.json`
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
#[command(allow_negative_numbers = true)]
struct ExactifyArgs {
    /// JSON config file supplying defaults; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Velocity damping coefficient
    #[arg(long)]
    eta: Option<f64>,
    /// Elastic constant
    #[arg(long)]
    kappa: Option<f64>,
    /// Position drag
    #[arg(long)]
    lambda: Option<f64>,
    /// Position-position diffusion entry
    #[arg(long)]
    sxx2: Option<f64>,
    /// Position-velocity diffusion entry
    #[arg(long)]
    sxv2: Option<f64>,
    /// Velocity-velocity diffusion entry
    #[arg(long)]
    svv2: Option<f64>,
    /// Sampling interval
    #[arg(long)]
    tau: Option<f64>,
    /// Sweep of sampling intervals; emits a CSV comparison of exact vs first-order parameters
    #[arg(long, value_delimiter = ',')]
    tau_sweep: Option<Vec<f64>>,
    /// Output path; the manifest lands at `<out>.manifest.json`
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
#[command(allow_negative_numbers = true)]
struct InferArgs {
    /// JSON config file supplying defaults; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Likelihood to fit
    #[arg(long, value_enum)]
    scheme: Option<InferSchemeArg>,
    /// CSV series (`n,x` header) to fit; otherwise integrated-OU data are generated
    #[arg(long)]
    data: Option<PathBuf>,
    /// Velocity damping coefficient
    #[arg(long)]
    eta: Option<f64>,
    /// Equilibrium temperature
    #[arg(long)]
    temperature: Option<f64>,
    /// Sampling interval
    #[arg(long)]
    tau: Option<f64>,
    /// Sweep of sampling intervals (generated data only)
    #[arg(long, value_delimiter = ',')]
    sweep_tau: Option<Vec<f64>>,
    /// Number of observations
    #[arg(long)]
    n: Option<usize>,
    /// Monte-Carlo replicas, aggregated by mean and standard error
    #[arg(long)]
    replicas: Option<usize>,
    /// Base seed; replicas derive independent substreams
    #[arg(long)]
    seed: Option<u64>,
    /// Include the position regressor in the finite-difference fit
    #[arg(long)]
    with_kappa: bool,
    /// Output path; the manifest lands at `<out>.manifest.json`
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
#[command(allow_negative_numbers = true)]
struct ExperimentArgs {
    /// JSON config file supplying defaults; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Velocity damping coefficient
    #[arg(long)]
    eta: Option<f64>,
    /// Elastic constant
    #[arg(long)]
    kappa: Option<f64>,
    /// Cubic-force coefficient
    #[arg(long)]
    lambda4: Option<f64>,
    /// Equilibrium temperature
    #[arg(long)]
    temperature: Option<f64>,
    /// Fine simulation step; defaults to 80% of the stability budget
    #[arg(long)]
    tau_sim: Option<f64>,
    /// Record every k-th fine step
    #[arg(long)]
    subsample: Option<usize>,
    /// Observations per replica (after subsampling)
    #[arg(long)]
    n: Option<usize>,
    /// Monte-Carlo replicas, aggregated by mean and standard error
    #[arg(long)]
    replicas: Option<usize>,
    /// Base seed; replicas derive independent substreams
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; the manifest lands at `<out>.manifest.json`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Payload format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

/// CLI failure with its exit-code class; rendered as one JSON line on
/// stderr.
pub struct AppError {
    kind: &'static str,
    message: String,
}

impl AppError {
    pub fn config(message: String) -> Self {
        Self {
            kind: "config",
            message,
        }
    }

    pub fn io(message: String) -> Self {
        Self { kind: "io", message }
    }

    pub fn numerical(message: String) -> Self {
        Self {
            kind: "numerical",
            message,
        }
    }

    fn exit_code(&self) -> u8 {
        match self.kind {
            "config" => 2,
            _ => 3,
        }
    }
}

impl From<rgarma::Error> for AppError {
    fn from(e: rgarma::Error) -> Self {
        match e {
            rgarma::Error::InvalidParameter(_) => AppError::config(e.to_string()),
            _ => AppError::numerical(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Decimate(args) => commands::decimate(args),
        Command::Flow(args) => commands::flow(args),
        Command::Classify(args) => commands::classify(args),
        Command::Exactify(args) => commands::exactify(args),
        Command::Infer(args) => commands::infer(args),
        Command::Experiment(args) => commands::experiment(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({"error": {"kind": e.kind, "message": e.message}})
            );
            ExitCode::from(e.exit_code())
        }
    }
}
