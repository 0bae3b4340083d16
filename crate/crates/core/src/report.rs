//! Serializable reports and plot-ready tables.
//!
//! Every report is wrapped in an [`Envelope`] carrying the tool version and
//! the exact configuration that produced it. The wall-clock timestamp is kept
//! in its own field so two runs can be compared byte-for-byte with it removed.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::data::SurvivalDataset;
use crate::error::{CoxError, Result};
use crate::optimizer::CoxModel;
use crate::stability::{importance, rank_features, scaled_importance, BootstrapRun};

pub const TOOL_NAME: &str = "coxstab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<C, R> {
    pub tool: String,
    pub version: String,
    pub config: C,
    pub result: R,
    /// Seconds since the Unix epoch; `None` for reproducibility comparisons.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub generated_at: Option<u64>,
}

impl<C: Serialize, R: Serialize> Envelope<C, R> {
    pub fn new(config: C, result: R) -> Self {
        Envelope {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            config,
            result,
            generated_at: None,
        }
    }

    pub fn stamped(mut self) -> Self {
        self.generated_at = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
        self
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| CoxError::contract(e.to_string()))
    }

    /// JSON with the timestamp field removed.
    pub fn to_json_unstamped(&self) -> Result<String>
    where
        C: Clone,
        R: Clone,
    {
        let mut copy = self.clone();
        copy.generated_at = None;
        copy.to_json()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRow {
    pub rank: usize,
    pub feature: String,
    pub code: String,
    pub weight: f64,
    /// Importance scaled so the top feature is 100.
    pub importance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub initial: f64,
    pub final_value: f64,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub p: usize,
    pub events: usize,
    pub n_iter: usize,
    pub converged: bool,
    pub objective: TraceSummary,
    pub nonzero: usize,
    pub top_features: Vec<ImportanceRow>,
}

/// Summary of a fit, with the `top` features by importance that have
/// nonzero weight.
pub fn fit_report(model: &CoxModel, ds: &SurvivalDataset, top: usize) -> Result<FitReport> {
    let raw = importance(model, ds)?;
    let scaled = scaled_importance(&raw);
    let top_features = rank_features(&raw)
        .into_iter()
        .filter(|&i| model.weights[i] != 0.0)
        .take(top)
        .enumerate()
        .map(|(r, i)| ImportanceRow {
            rank: r + 1,
            feature: ds.meta()[i].name.clone(),
            code: ds.meta()[i].code.clone(),
            weight: model.weights[i],
            importance: (scaled[i] * 10.0).round() / 10.0,
        })
        .collect();
    let trace = &model.objective_trace;
    Ok(FitReport {
        alpha: model.alpha,
        beta: model.beta,
        n: ds.n(),
        p: ds.p(),
        events: ds.q(),
        n_iter: model.n_iter,
        converged: model.converged,
        objective: TraceSummary {
            initial: trace.first().copied().unwrap_or(f64::NAN),
            final_value: trace.last().copied().unwrap_or(f64::NAN),
            length: trace.len(),
        },
        nonzero: model.nonzero_count(),
        top_features,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub k: usize,
    pub mean_jaccard: f64,
    pub mean_consistency: f64,
}

pub fn stability_curve(run: &BootstrapRun, ks: &[usize]) -> Result<Vec<CurvePoint>> {
    ks.iter()
        .map(|&k| {
            let (_, r) = run.report(k)?;
            Ok(CurvePoint {
                k,
                mean_jaccard: r.mean_jaccard,
                mean_consistency: r.mean_consistency,
            })
        })
        .collect()
}

pub fn write_curve_csv<W: Write>(points: &[CurvePoint], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "mean_jaccard", "mean_consistency"])?;
    for p in points {
        w.write_record([
            p.k.to_string(),
            p.mean_jaccard.to_string(),
            p.mean_consistency.to_string(),
        ])?;
    }
    w.flush()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub alpha: f64,
    pub beta: f64,
    pub auc: f64,
    pub nonzeros: usize,
    pub mean_consistency: f64,
    pub mean_jaccard: f64,
}

pub fn write_grid_csv<W: Write>(rows: &[GridRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "beta", "auc", "nonzeros", "mean_consistency", "mean_jaccard"])?;
    for r in rows {
        w.write_record([
            r.alpha.to_string(),
            r.beta.to_string(),
            r.auc.to_string(),
            r.nonzeros.to_string(),
            r.mean_consistency.to_string(),
            r.mean_jaccard.to_string(),
        ])?;
    }
    w.flush()
}
