use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Certify genuine multipartite entanglement from correlations in mutually
/// unbiased bases. All angles are in radians.
#[derive(Debug, Parser)]
#[command(name = "mubgme", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the criterion matching the state's party count and print a JSON report.
    Certify(CertifyArgs),
    /// Sweep one family parameter and emit the criterion with its companion measure.
    Sweep(SweepArgs),
    /// Grid search for I_2 increasing under a local two-outcome POVM.
    Locc(LoccArgs),
    /// Run a seeded random campaign against a separability bound.
    CheckBounds(CheckBoundsArgs),
    /// Write fig1.csv .. fig5.csv into a directory.
    Figures(FiguresArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    #[value(name = "psi_lambda")]
    PsiLambda,
    Bell,
    Ghz3,
    W3,
    Acin,
    Ghz4,
    Wg4,
    /// |00⟩
    Product2,
    /// |000⟩
    Product3,
    /// |0000⟩
    Product4,
    /// Haar-random pure qubit state; see --parties and --seed.
    Random,
}

/// Family parameters. Unset values fall back to per-family defaults.
#[derive(Clone, Debug, Default, Args)]
pub struct FamilyParams {
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    /// Five comma-separated weights for the acin family.
    #[arg(long, value_delimiter = ',', num_args = 5)]
    pub weights: Option<Vec<f64>>,
    /// Qubit count for the random family.
    #[arg(long, default_value_t = 3)]
    pub parties: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum MubChoice {
    /// Computational and Fourier bases.
    #[default]
    Pair,
    /// Largest known family for the dimension.
    Complete,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Args)]
#[group(id = "input", required = true, multiple = false, args = ["family", "state"])]
pub struct CertifyArgs {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// JSON state file: {"dims":[..],"amplitudes":[[re,im],..]}.
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[command(flatten)]
    pub params: FamilyParams,
    /// Bases used for two-party states.
    #[arg(long, value_enum, default_value_t)]
    pub mubs: MubChoice,
    /// Search all per-party pairs of distinct Pauli bases (3 or 4 qubits).
    #[arg(long)]
    pub basis_search: bool,
    /// Recompute the value along the brute-force path and fail on mismatch.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepFamily {
    #[value(name = "psi_lambda")]
    PsiLambda,
    Ghz3,
    W3,
    Ghz4,
    Wg4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Param {
    Theta,
    Alpha,
    Mu,
    Nu,
    Lambda,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: SweepFamily,
    /// Swept parameter; defaults to mu for wg4, lambda for psi_lambda and theta otherwise.
    #[arg(long, value_enum)]
    pub param: Option<Param>,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 201)]
    pub steps: usize,
    #[command(flatten)]
    pub params: FamilyParams,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Re-check every 100th row against the brute-force path.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LoccFamily {
    Bell,
    #[value(name = "psi_lambda")]
    PsiLambda,
    Product2,
}

#[derive(Debug, Args)]
pub struct LoccArgs {
    #[arg(long, value_enum, conflicts_with = "state")]
    pub family: Option<LoccFamily>,
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Points per swept axis over [-π, π].
    #[arg(long, default_value_t = 61)]
    pub grid: usize,
    /// Pin χ instead of sweeping it.
    #[arg(long, allow_hyphen_values = true)]
    pub chi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta_cap: f64,
    /// Measure the second party instead of the first.
    #[arg(long)]
    pub mirror_povm: bool,
    /// Directory for grid.csv, density.csv and summary.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoundClass {
    Biseparable3,
    Biseparable4,
    SeparableBipartite,
}

#[derive(Debug, Args)]
pub struct CheckBoundsArgs {
    #[arg(long, value_enum)]
    pub class: BoundClass,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Local dimension for separable-bipartite.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, value_enum, default_value_t)]
    pub mubs: MubChoice,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Points per curve.
    #[arg(long, default_value_t = 201)]
    pub steps: usize,
    /// Points per axis for the fig1 density data.
    #[arg(long, default_value_t = 61)]
    pub grid: usize,
    #[arg(long)]
    pub verify: bool,
}
