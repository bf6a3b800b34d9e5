//! Command-line front end: dataset sampling, gradient checking, training
//! runs, and forward-trace dumps.
//!
//! Exit codes are a stable contract: 0 on success, 1 when a gradient check
//! exceeds its tolerance, 2 on usage or IO errors.

mod commands;
mod fmtio;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use matbp::{ActivationKind, CostKind, NetworkSpec};

#[derive(Parser)]
#[command(
    name = "matbp",
    about = "Matrix-form backpropagation: train, gradient-check, and trace small feedforward networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a two-class Gaussian-mixture dataset to CSV.
    SampleData(SampleDataArgs),
    /// Compare backpropagation against the chain-rule and difference-quotient oracles.
    Gradcheck(GradcheckArgs),
    /// Run gradient descent on a dataset, emitting metric CSVs and final weights.
    Train(TrainArgs),
    /// Print the potentials and activations of one forward pass.
    Forward(ForwardArgs),
}

#[derive(Args)]
struct SampleDataArgs {
    /// Number of exemplars.
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// RNG seed (falls back to MATBP_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: String,
    /// Mean of class (1,0), as "m1,m2".
    #[arg(long, default_value = "-1,-1")]
    mu0: String,
    /// Mean of class (0,1), as "m1,m2".
    #[arg(long, default_value = "1,1")]
    mu1: String,
    /// Isotropic covariance scale (covariance = scale * I).
    #[arg(long, default_value_t = 0.5)]
    sigma_scale: f64,
}

#[derive(Args)]
struct NetworkArgs {
    /// Layer widths, e.g. "2,3,3,2".
    #[arg(long)]
    dims: String,
    /// Activation used at every layer.
    #[arg(long, value_enum)]
    activation: ActivationArg,
    /// Slope for the leaky rectifier.
    #[arg(long, default_value_t = 0.01)]
    leaky_slope: f64,
    /// Cost function.
    #[arg(long, value_enum)]
    cost: CostArg,
}

#[derive(Args)]
struct GradcheckArgs {
    #[command(flatten)]
    network: NetworkArgs,
    /// RNG seed (falls back to MATBP_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance for backpropagation vs the chain-rule oracle.
    #[arg(long, default_value_t = 1e-12)]
    bp_tol: f64,
    /// Tolerance for backpropagation vs central finite differences.
    #[arg(long, default_value_t = 1e-5)]
    fd_tol: f64,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
}

#[derive(Args)]
struct TrainArgs {
    /// Dataset CSV produced by sample-data (or compatible).
    #[arg(long)]
    data: String,
    #[command(flatten)]
    network: NetworkArgs,
    /// Learning rate.
    #[arg(long)]
    alpha: f64,
    /// Number of gradient-descent updates.
    #[arg(long, default_value_t = 100)]
    iters: usize,
    /// RNG seed for weight init (falls back to MATBP_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Minibatch size; full-batch descent when absent.
    #[arg(long)]
    batch_size: Option<usize>,
    /// Prefix for output files (<prefix>_metrics.csv etc.).
    #[arg(long, default_value = "train")]
    out_prefix: String,
}

#[derive(Args)]
struct ForwardArgs {
    /// Layer widths, e.g. "2,3,3,2".
    #[arg(long)]
    dims: String,
    /// Activation used at every layer.
    #[arg(long, value_enum, default_value = "logistic")]
    activation: ActivationArg,
    /// Slope for the leaky rectifier.
    #[arg(long, default_value_t = 0.01)]
    leaky_slope: f64,
    /// Input vector, e.g. "0.2,0.8".
    #[arg(long)]
    x: String,
    /// Weights file; seeded standard-normal init when absent.
    #[arg(long)]
    weights: Option<String>,
    /// RNG seed for weight init (falls back to MATBP_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    format: TraceFormat,
    /// Write the trace to a file instead of stdout (adds a manifest).
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraceFormat {
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ActivationArg {
    Logistic,
    Tanh,
    Relu,
    LeakyRelu,
}

impl ActivationArg {
    fn to_kind(self, leaky_slope: f64) -> ActivationKind {
        match self {
            ActivationArg::Logistic => ActivationKind::Logistic,
            ActivationArg::Tanh => ActivationKind::Tanh,
            ActivationArg::Relu => ActivationKind::ReLU,
            ActivationArg::LeakyRelu => ActivationKind::LeakyReLU { slope: leaky_slope },
        }
    }

    fn name(self) -> &'static str {
        match self {
            ActivationArg::Logistic => "logistic",
            ActivationArg::Tanh => "tanh",
            ActivationArg::Relu => "relu",
            ActivationArg::LeakyRelu => "leaky-relu",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CostArg {
    Quadratic,
    CrossEntropy,
}

impl CostArg {
    fn to_kind(self) -> CostKind {
        match self {
            CostArg::Quadratic => CostKind::Quadratic,
            CostArg::CrossEntropy => CostKind::CrossEntropy,
        }
    }

    fn name(self) -> &'static str {
        match self {
            CostArg::Quadratic => "quadratic",
            CostArg::CrossEntropy => "cross-entropy",
        }
    }
}

/// Seed resolution order: explicit flag, then MATBP_SEED, then 0.
fn resolve_seed(flag: Option<u64>) -> Result<u64, String> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("MATBP_SEED") {
        Ok(raw) => raw.parse().map_err(|_| format!("MATBP_SEED is not a valid seed: '{raw}'")),
        Err(_) => Ok(0),
    }
}

fn parse_dims(raw: &str) -> Result<Vec<usize>, String> {
    raw.split(',')
        .map(|d| d.trim().parse::<usize>().map_err(|_| format!("bad layer width '{d}' in --dims")))
        .collect()
}

fn parse_vector(raw: &str, what: &str) -> Result<Vec<f64>, String> {
    raw.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad value '{v}' in {what}")))
        .collect()
}

impl NetworkArgs {
    fn build_spec(&self) -> Result<NetworkSpec, String> {
        // Cross-entropy needs outputs strictly inside (0, 1), which only the
        // logistic activation guarantees; reject the pairing up front
        // instead of failing on whichever exemplar first leaves the domain.
        if self.cost == CostArg::CrossEntropy && self.activation != ActivationArg::Logistic {
            return Err(format!(
                "cross-entropy cost is undefined for {} networks: outputs are not confined to (0, 1); use --activation logistic",
                self.activation.name()
            ));
        }
        let dims = parse_dims(&self.dims)?;
        NetworkSpec::new(dims, self.activation.to_kind(self.leaky_slope)).map_err(|e| e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::SampleData(args) => commands::sample_data(args),
        Command::Gradcheck(args) => commands::gradcheck(args),
        Command::Train(args) => commands::train(args),
        Command::Forward(args) => commands::forward(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
