use coxstab::{FitOptions, SynthConfig};
use serde::Serialize;

/// Everything that determines a run's output. Embedded verbatim in every
/// file the run writes. Thread count is deliberately absent: it changes
/// scheduling, never results.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub features: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval_features: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval_meta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holdout_fraction: Option<f64>,
    pub out_dir: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub betas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix_len: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standardize: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon_days: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_resamples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstraps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub top_k: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitOptions>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthConfig>,
}

impl RunConfig {
    pub fn new(command: &str, out_dir: &std::path::Path) -> Self {
        RunConfig {
            command: command.to_string(),
            out_dir: out_dir.display().to_string(),
            ..RunConfig::default()
        }
    }
}
