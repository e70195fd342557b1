use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tsplab::geometry::InstanceKind;
use tsplab::oracle::SlackPolicy;

#[derive(Parser, Debug)]
#[command(
    name = "tsplab",
    version,
    about = "Tour-wave experiments and solvers for small Euclidean TSP instances"
)]
pub struct Cli {
    /// RNG seed (ChaCha8, seeded through `seed_from_u64`).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Generate a random or structured instance.
    Gen(GenArgs),
    /// Permutation to insertion code.
    Encode(EncodeArgs),
    /// Insertion code (or rank) to permutation.
    Decode(DecodeArgs),
    /// Prepare the uniform or tilted wave and dump its probabilities.
    Wave(WaveArgs),
    /// Measure a prepared wave repeatedly.
    Sample(SampleArgs),
    /// Enumerate every tour length and summarize.
    Dist(DistArgs),
    /// Fit a Gaussian to uniform tour lengths and evaluate the analysis ratios.
    Fit(FitArgs),
    /// Range-oracle formula against simulated runs.
    Oracle(OracleArgs),
    /// Tilted-sampling solver.
    SolveGaussian(SolveGaussianArgs),
    /// Range-oracle bin search solver.
    SolveOracle(SolveOracleArgs),
    /// Exact optimum.
    Exact(ExactArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    #[arg(long, value_parser = parse_kind, default_value = "uniform")]
    pub kind: InstanceKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub name: Option<String>,
}

fn parse_kind(s: &str) -> Result<InstanceKind, String> {
    s.parse().map_err(|e: tsplab::Error| e.to_string())
}

#[derive(Args, Debug, Serialize)]
pub struct EncodeArgs {
    /// Comma-separated permutation of 1..=n, e.g. `2,3,1`.
    #[arg(long)]
    pub perm: String,
}

#[derive(Args, Debug, Serialize)]
pub struct DecodeArgs {
    /// Comma-separated insertion code, e.g. `1,1,2`.
    #[arg(long, conflicts_with = "rank", required_unless_present = "rank")]
    pub code: Option<String>,
    #[arg(long, requires = "n")]
    pub rank: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
}

/// Which wave to prepare: uniform over `--n` cities, or tilted by `--alpha`
/// on an instance.
#[derive(Args, Debug, Serialize)]
pub struct WaveSource {
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Number of cities for the uniform wave (taken from the instance when given).
    #[arg(long)]
    pub n: Option<usize>,
    /// Tilt base; requires an instance.
    #[arg(long, requires = "instance")]
    pub alpha: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct WaveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: WaveSource,
}

#[derive(Args, Debug, Serialize)]
pub struct SampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: WaveSource,
    #[arg(long, default_value_t = 1000)]
    pub shots: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct DistArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    /// Also report the Boltzmann table at this tilt.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// CSV output dumps the rank,code,probability table instead of the histogram.
    #[arg(long)]
    pub table: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct FitArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pub pilot: usize,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Defaults to the tilt that centers the fitted Gaussian on the minimum estimate.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct OracleArgs {
    /// Marked tours.
    #[arg(long)]
    pub m: usize,
    /// Total tours N.
    #[arg(long = "n-total")]
    pub n_total: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct SolveGaussianArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub repetitions: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub pilot: usize,
    #[arg(long, default_value_t = 4.0)]
    pub c: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub fail: f64,
    #[arg(long, default_value_t = tsplab::DEFAULT_ENUMERATION_LIMIT)]
    pub enumeration_limit: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    Sampled,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VoteArg {
    Majority,
    Margin,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyArg {
    Strict,
    Permissive,
}

impl From<PolicyArg> for SlackPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Strict => SlackPolicy::Strict,
            PolicyArg::Permissive => SlackPolicy::Permissive,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SolveOracleArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Machine runs per bin in sampled mode.
    #[arg(long, default_value_t = 1001)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = VoteArg::Majority)]
    pub vote: VoteArg,
    /// Standard deviations of margin required by `--vote margin`.
    #[arg(long, default_value_t = 4.0)]
    pub z: f64,
    #[arg(long, value_enum, default_value_t = PolicyArg::Strict)]
    pub policy: PolicyArg,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    HeldKarp,
    BruteForce,
}

#[derive(Args, Debug, Serialize)]
pub struct ExactArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::HeldKarp)]
    pub method: Method,
}
