use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use medimux_core::Family;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Linear,
    Logit,
    Probit,
}

impl From<FamilyArg> for Family {
    fn from(value: FamilyArg) -> Family {
        match value {
            FamilyArg::Linear => Family::Linear,
            FamilyArg::Logit => Family::Logit,
            FamilyArg::Probit => Family::Probit,
        }
    }
}

/// Causal mediation analysis with multiple correlated mediators.
#[derive(Debug, Parser)]
#[command(name = "medimux", version, about)]
pub struct Cli {
    /// Worker threads (default: machine parallelism). Results are
    /// identical for every thread count.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate direct and indirect effects from observed data.
    Mediate(MediateArgs),
    /// Simulate an observed dataset from a model specification.
    Simulate(SimulateArgs),
    /// Compute oracle effect values from a large counterfactual table.
    Truth(TruthArgs),
    /// Run a repeated-run estimator study over a parameter grid.
    Study(StudyArgs),
    /// Evaluate the analytic effect formulas for a model specification.
    ClosedForm(ClosedFormArgs),
}

#[derive(Debug, Args)]
pub struct MediateArgs {
    /// Analysis configuration file (TOML); flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Input CSV file (UTF-8, header row, comma separated).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Treatment column (0/1).
    #[arg(long)]
    pub treatment: Option<String>,
    /// Mediator columns, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub mediators: Option<Vec<String>>,
    /// Outcome column.
    #[arg(long)]
    pub outcome: Option<String>,
    /// Covariate columns, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub covariates: Option<Vec<String>>,
    /// Outcome model family.
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Parameter draws R.
    #[arg(long, value_name = "R")]
    pub draws: Option<usize>,
    /// Simulated individuals per draw I.
    #[arg(long, value_name = "I")]
    pub sims: Option<usize>,
    /// Confidence level of the percentile intervals.
    #[arg(long, value_name = "LEVEL")]
    pub ci: Option<f64>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run a single-mediator analysis of mediator K (1-based) instead of
    /// the multiple-mediator analysis.
    #[arg(long, value_name = "K")]
    pub simple: Option<usize>,
    /// Box-Cox transform, e.g. --boxcox m1=0.38 (repeatable).
    #[arg(long, value_name = "COL=LAMBDA")]
    pub boxcox: Vec<String>,
    /// Report file (JSON); stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write the raw per-draw effects as CSV.
    #[arg(long, value_name = "PATH")]
    pub draws_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Model specification file (TOML).
    #[arg(long)]
    pub model: PathBuf,
    /// Number of observed rows to produce.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path.
    #[arg(long)]
    pub output: PathBuf,
    /// Also compute and cache the ground-truth effects of this model.
    #[arg(long)]
    pub cache_truth: bool,
    /// Oracle table size used with --cache-truth.
    #[arg(long, default_value_t = 1_000_000)]
    pub truth_rows: usize,
    /// Truth cache directory (defaults to MEDIMUX_CACHE_DIR).
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TruthArgs {
    /// Model specification file (TOML).
    #[arg(long)]
    pub model: PathBuf,
    /// Counterfactual table size behind the oracle.
    #[arg(long, default_value_t = 1_000_000)]
    pub rows: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output JSON path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Truth cache directory (defaults to MEDIMUX_CACHE_DIR).
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    /// Model specification file (TOML).
    #[arg(long)]
    pub model: PathBuf,
    /// Observed sample sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    /// Mediator residual correlations, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub correlations: Vec<f64>,
    /// Simulation runs per grid cell.
    #[arg(long, default_value_t = 200)]
    pub runs: usize,
    #[arg(long, value_name = "R", default_value_t = 1000)]
    pub draws: usize,
    #[arg(long, value_name = "I", default_value_t = 1000)]
    pub sims: usize,
    #[arg(long, value_name = "LEVEL", default_value_t = 0.95)]
    pub ci: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Oracle table size per cell.
    #[arg(long, default_value_t = 1_000_000)]
    pub truth_rows: usize,
    /// Output CSV path (long format).
    #[arg(long)]
    pub output: PathBuf,
    /// Optional JSON mirror of the aggregated metrics.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Truth cache directory (defaults to MEDIMUX_CACHE_DIR).
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClosedFormArgs {
    /// Model specification file (TOML).
    #[arg(long)]
    pub model: PathBuf,
    /// Output JSON path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}
