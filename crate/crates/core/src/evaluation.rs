//! Risk scores and horizon AUC on held-out data.
//!
//! A subject is positive if the event was observed by the horizon, negative
//! if still event-free after it, and excluded if censored before it (its
//! outcome at the horizon is unknown).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::SurvivalDataset;
use crate::error::{CoxError, Result};
use crate::optimizer::CoxModel;

/// Six months.
pub const DEFAULT_HORIZON_DAYS: f64 = 182.0;
pub const DEFAULT_CI_RESAMPLES: usize = 2000;
pub const DEFAULT_CI_SEED: u64 = 0x05EE_DA0C;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HorizonLabel {
    Positive,
    Negative,
    Excluded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonLabeling {
    pub horizon: f64,
    pub labels: Vec<HorizonLabel>,
}

impl HorizonLabeling {
    pub fn new(times: &[f64], events: &[bool], horizon: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(CoxError::contract(format!("horizon must be positive, got {horizon}")));
        }
        if times.len() != events.len() {
            return Err(CoxError::contract("times and events differ in length"));
        }
        let labels = times
            .iter()
            .zip(events)
            .map(|(&t, &e)| {
                if t > horizon {
                    HorizonLabel::Negative
                } else if e {
                    HorizonLabel::Positive
                } else {
                    HorizonLabel::Excluded
                }
            })
            .collect();
        Ok(HorizonLabeling { horizon, labels })
    }

    pub fn from_dataset(ds: &SurvivalDataset, horizon: f64) -> Result<Self> {
        HorizonLabeling::new(ds.times(), ds.events(), horizon)
    }

    /// `(positives, negatives, excluded)`.
    pub fn counts(&self) -> (usize, usize, usize) {
        self.labels.iter().fold((0, 0, 0), |(p, n, x), l| match l {
            HorizonLabel::Positive => (p + 1, n, x),
            HorizonLabel::Negative => (p, n + 1, x),
            HorizonLabel::Excluded => (p, n, x + 1),
        })
    }
}

/// Linear predictor `w·x`; higher means earlier expected event.
pub fn risk_score(model: &CoxModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.weights.len() {
        return Err(CoxError::contract(format!(
            "feature vector has length {}, model has {} weights",
            x.len(),
            model.weights.len()
        )));
    }
    Ok(model.weights.iter().zip(x).map(|(w, v)| w * v).sum())
}

/// Scores every row of a raw (unstandardized) dataset, applying the model's
/// training standardization first when it has one.
pub fn score_dataset(model: &CoxModel, ds: &SurvivalDataset) -> Result<Vec<f64>> {
    let prepared;
    let ds = match (&model.standardization, ds.is_standardized()) {
        (Some(stats), false) => {
            prepared = ds.standardize_with(stats)?;
            &prepared
        }
        _ => ds,
    };
    (0..ds.n())
        .map(|i| risk_score(model, ds.row(i).as_slice().expect("rows are contiguous")))
        .collect()
}

/// Mann–Whitney AUC over the labeled subset, via mid-ranks in O(n log n).
pub fn auc_point(scores: &[f64], labels: &HorizonLabeling) -> Result<f64> {
    if scores.len() != labels.labels.len() {
        return Err(CoxError::contract(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(CoxError::contract("scores contain NaN"));
    }
    let pairs: Vec<(f64, bool)> = scores
        .iter()
        .zip(&labels.labels)
        .filter_map(|(&s, l)| match l {
            HorizonLabel::Positive => Some((s, true)),
            HorizonLabel::Negative => Some((s, false)),
            HorizonLabel::Excluded => None,
        })
        .collect();
    mann_whitney(pairs)
}

fn mann_whitney(mut pairs: Vec<(f64, bool)>) -> Result<f64> {
    let n_pos = pairs.iter().filter(|p| p.1).count();
    let n_neg = pairs.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(CoxError::DegenerateLabeling(format!(
            "{n_pos} positives and {n_neg} negatives"
        )));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum_pos = 0.0;
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].0 == pairs[start].0 {
            end += 1;
        }
        // 1-based ranks start+1..=end share their mean
        let mid_rank = (start + 1 + end) as f64 / 2.0;
        let pos_in_block = pairs[start..end].iter().filter(|p| p.1).count();
        rank_sum_pos += mid_rank * pos_in_block as f64;
        start = end;
    }
    let np = n_pos as f64;
    let u = rank_sum_pos - np * (np + 1.0) / 2.0;
    Ok(u / (np * n_neg as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AucEstimate {
    pub auc: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_excluded: usize,
}

/// AUC with a 95% percentile-bootstrap interval over labeled subjects.
///
/// Resamples that contain only one class are discarded and redrawn.
pub fn auc(
    scores: &[f64],
    labels: &HorizonLabeling,
    resamples: usize,
    seed: u64,
) -> Result<AucEstimate> {
    let point = auc_point(scores, labels)?;
    let (n_pos, n_neg, n_excluded) = labels.counts();
    let labeled: Vec<(f64, bool)> = scores
        .iter()
        .zip(&labels.labels)
        .filter_map(|(&s, l)| match l {
            HorizonLabel::Positive => Some((s, true)),
            HorizonLabel::Negative => Some((s, false)),
            HorizonLabel::Excluded => None,
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = labeled.len() as u64;
    let mut stats = Vec::with_capacity(resamples);
    let max_draws = resamples.saturating_mul(10).max(100);
    let mut draws = 0;
    while stats.len() < resamples && draws < max_draws {
        draws += 1;
        let sample: Vec<(f64, bool)> = (0..m)
            .map(|_| labeled[rng.random_range(0..m) as usize])
            .collect();
        if let Ok(a) = mann_whitney(sample) {
            stats.push(a);
        }
    }
    let (ci_low, ci_high) = if stats.is_empty() {
        (point, point)
    } else {
        stats.sort_by(f64::total_cmp);
        (quantile(&stats, 0.025), quantile(&stats, 0.975))
    };
    Ok(AucEstimate {
        auc: point,
        ci_low,
        ci_high,
        n_pos,
        n_neg,
        n_excluded,
    })
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub horizon_days: f64,
    pub auc: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_excluded: usize,
}

/// Scores a held-out dataset and computes its horizon AUC.
pub fn evaluate(
    model: &CoxModel,
    ds: &SurvivalDataset,
    horizon: f64,
    resamples: usize,
    seed: u64,
) -> Result<EvaluationReport> {
    let scores = score_dataset(model, ds)?;
    let labels = HorizonLabeling::from_dataset(ds, horizon)?;
    let est = auc(&scores, &labels, resamples, seed)?;
    Ok(EvaluationReport {
        horizon_days: horizon,
        auc: est.auc,
        ci_low: est.ci_low,
        ci_high: est.ci_high,
        n_pos: est.n_pos,
        n_neg: est.n_neg,
        n_excluded: est.n_excluded,
    })
}
