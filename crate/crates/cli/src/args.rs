use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use coxstab::evaluation::{DEFAULT_CI_RESAMPLES, DEFAULT_HORIZON_DAYS};
use coxstab::graph::DEFAULT_PREFIX_LEN;

#[derive(Debug, Parser)]
#[command(name = "coxstab", version, about = "Graph-regularized sparse Cox regression with bootstrap stability")]
pub struct Cli {
    /// Worker threads for bootstrap replicates and grid cells (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model and write model.json and fit_report.json.
    Train(TrainArgs),
    /// Score held-out data with a fitted model and report horizon AUC.
    Evaluate(EvaluateArgs),
    /// Bootstrap feature-selection stability for one or more k.
    Stability(StabilityArgs),
    /// Sweep alpha x beta; one CSV row per cell (AUC, nonzeros, stability).
    Grid(GridArgs),
    /// Generate a synthetic dataset with planted correlated groups.
    Synth(SynthArgs),
    /// Write the feature graph as an edge list.
    GraphExport(GraphExportArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Feature CSV: time,event,<feature columns>.
    #[arg(long)]
    pub features: PathBuf,
    /// Feature metadata CSV: name,code,window_id,event_key.
    #[arg(long)]
    pub meta: PathBuf,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Code prefix length for graph edges ('.' is ignored).
    #[arg(long, default_value_t = DEFAULT_PREFIX_LEN)]
    pub prefix_len: usize,
    /// Fit on raw features instead of standardized ones.
    #[arg(long)]
    pub no_standardize: bool,
    /// Relative objective change that stops the optimizer.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// L1 penalty.
    #[arg(long, default_value_t = 0.004, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Graph penalty.
    #[arg(long, default_value_t = 0.03, allow_negative_numbers = true)]
    pub beta: f64,
    /// Rows in the importance table.
    #[arg(long, default_value_t = 20)]
    pub top_k: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// model.json written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = DEFAULT_HORIZON_DAYS)]
    pub horizon_days: f64,
    /// Bootstrap resamples for the AUC interval.
    #[arg(long, default_value_t = DEFAULT_CI_RESAMPLES)]
    pub ci_resamples: usize,
    #[arg(long, env = "COXSTAB_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0.004, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.03, allow_negative_numbers = true)]
    pub beta: f64,
    /// Bootstrap replicates (B).
    #[arg(long, default_value_t = 100)]
    pub bootstraps: usize,
    /// Subset sizes, comma separated, e.g. 10,20,30.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub top_k: Vec<usize>,
    #[arg(long, env = "COXSTAB_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub betas: Vec<f64>,
    /// Separate evaluation data (with --eval-meta).
    #[arg(long, requires = "eval_meta")]
    pub eval_features: Option<PathBuf>,
    #[arg(long, requires = "eval_features")]
    pub eval_meta: Option<PathBuf>,
    /// Hold out this fraction of rows for evaluation instead.
    #[arg(long, conflicts_with = "eval_features")]
    pub holdout_fraction: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_HORIZON_DAYS)]
    pub horizon_days: f64,
    #[arg(long, default_value_t = DEFAULT_CI_RESAMPLES)]
    pub ci_resamples: usize,
    #[arg(long, default_value_t = 100)]
    pub bootstraps: usize,
    /// Subset size for the stability columns.
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
    #[arg(long, env = "COXSTAB_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

/// Unset values fall back to the shipped instance.
#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub n_groups: Option<usize>,
    #[arg(long)]
    pub group_size: Option<usize>,
    /// Pairwise correlation within a group.
    #[arg(long)]
    pub within_corr: Option<f64>,
    #[arg(long)]
    pub n_noise: Option<usize>,
    /// One true coefficient per group, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub group_weights: Option<Vec<f64>>,
    /// Baseline hazard per time unit.
    #[arg(long)]
    pub baseline_rate: Option<f64>,
    /// Target censored fraction.
    #[arg(long)]
    pub censor_rate: Option<f64>,
    #[arg(long, env = "COXSTAB_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct GraphExportArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = DEFAULT_PREFIX_LEN)]
    pub prefix_len: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
}
