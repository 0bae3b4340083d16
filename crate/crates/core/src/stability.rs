//! Feature-selection stability under bootstrap resampling.
//!
//! Each bootstrap replicate draws `n` rows with replacement, re-standardizes,
//! fits a model and keeps the `k` features with the largest importance
//! `|w_i|·sd_i`. Stability of the resulting `B` subsets is summarized by the
//! mean pairwise Jaccard index and the mean pairwise Kuncheva consistency
//! index `(r·d − k²) / (k·(d − k))`.
//!
//! # Random streams
//!
//! Replicate `b` draws its rows from ChaCha8 seeded with `seed_from_u64(seed)`
//! and stream id `(attempt << 32) | b`, where `attempt` counts redraws of
//! replicates that came out without any event. Rows are drawn as
//! `random_range(0..n as u64)`, which is identical on 32- and 64-bit targets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::SurvivalDataset;
use crate::error::{CoxError, Result};
use crate::graph::Laplacian;
use crate::optimizer::{fit, CoxModel, FitOptions};

/// Redraw limit for a replicate that keeps drawing zero events.
pub const MAX_REPLICATE_ATTEMPTS: u64 = 100;

/// `|w_i|·sd_i`, with `sd_i` the population sd of feature `i` in `ds`.
pub fn importance(model: &CoxModel, ds: &SurvivalDataset) -> Result<Vec<f64>> {
    if model.weights.len() != ds.p() {
        return Err(CoxError::contract(format!(
            "model has {} weights, dataset has {} features",
            model.weights.len(),
            ds.p()
        )));
    }
    Ok(model
        .weights
        .iter()
        .zip(ds.column_sds())
        .map(|(w, sd)| w.abs() * sd)
        .collect())
}

/// Rescales so the largest importance is 100. All-zero input stays zero.
pub fn scaled_importance(raw: &[f64]) -> Vec<f64> {
    let max = raw.iter().cloned().fold(0.0f64, f64::max);
    if max > 0.0 {
        raw.iter().map(|v| 100.0 * v / max).collect()
    } else {
        vec![0.0; raw.len()]
    }
}

/// All feature indices ordered by decreasing importance; ties go to the
/// smaller index.
pub fn rank_features(importance: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..importance.len()).collect();
    order.sort_by(|&a, &b| importance[b].total_cmp(&importance[a]).then(a.cmp(&b)));
    order
}

/// Indices of the `k` most important features, returned in ascending index
/// order.
pub fn top_k(importance: &[f64], k: usize) -> Result<Vec<usize>> {
    let p = importance.len();
    if k == 0 || k >= p {
        return Err(CoxError::contract(format!(
            "top-k needs 1 <= k < p, got k = {k}, p = {p}"
        )));
    }
    let mut chosen = rank_features(importance);
    chosen.truncate(k);
    chosen.sort_unstable();
    Ok(chosen)
}

fn as_set(s: &[usize]) -> Vec<usize> {
    let mut v = s.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    // both sorted, deduplicated
    let (mut i, mut j, mut r) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                r += 1;
                i += 1;
                j += 1;
            }
        }
    }
    r
}

fn jaccard_sorted(a: &[usize], b: &[usize]) -> f64 {
    let r = intersection_size(a, b);
    r as f64 / (a.len() + b.len() - r) as f64
}

fn consistency_from_overlap(r: usize, k: usize, d: usize) -> f64 {
    let (r, k, d) = (r as f64, k as f64, d as f64);
    (r * d - k * k) / (k * (d - k))
}

/// `|A ∩ B| / |A ∪ B|`.
pub fn jaccard_pair(a: &[usize], b: &[usize]) -> Result<f64> {
    let (a, b) = (as_set(a), as_set(b));
    if a.is_empty() && b.is_empty() {
        return Err(CoxError::contract("Jaccard index of two empty sets is undefined"));
    }
    Ok(jaccard_sorted(&a, &b))
}

/// Kuncheva consistency index of two size-`k` subsets of `d` features.
pub fn consistency_pair(a: &[usize], b: &[usize], d: usize) -> Result<f64> {
    let (a, b) = (as_set(a), as_set(b));
    if a.len() != b.len() {
        return Err(CoxError::contract(format!(
            "consistency index needs equal subset sizes, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let k = a.len();
    if k == 0 || k >= d {
        return Err(CoxError::contract(format!(
            "consistency index needs 1 <= k < d, got k = {k}, d = {d}"
        )));
    }
    if a.iter().chain(&b).any(|&i| i >= d) {
        return Err(CoxError::contract(format!("feature index out of range for d = {d}")));
    }
    Ok(consistency_from_overlap(intersection_size(&a, &b), k, d))
}

/// `B` top-`k` subsets out of `d` features.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSubsetCollection {
    d: usize,
    k: usize,
    subsets: Vec<Vec<usize>>,
}

impl FeatureSubsetCollection {
    pub fn new(d: usize, k: usize, subsets: Vec<Vec<usize>>) -> Result<Self> {
        if k == 0 || k >= d {
            return Err(CoxError::contract(format!(
                "subset size must satisfy 1 <= k < d, got k = {k}, d = {d}"
            )));
        }
        let subsets: Vec<Vec<usize>> = subsets.iter().map(|s| as_set(s)).collect();
        for (b, s) in subsets.iter().enumerate() {
            if s.len() != k {
                return Err(CoxError::contract(format!(
                    "subset {b} has {} distinct features, expected {k}",
                    s.len()
                )));
            }
            if s.iter().any(|&i| i >= d) {
                return Err(CoxError::contract(format!(
                    "subset {b} has a feature index >= d = {d}"
                )));
            }
        }
        Ok(FeatureSubsetCollection { d, k, subsets })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn b(&self) -> usize {
        self.subsets.len()
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    #[serde(rename = "B")]
    pub b: usize,
    pub k: usize,
    pub d: usize,
    pub mean_jaccard: f64,
    pub mean_consistency: f64,
    /// Pairs `(a, b)` with `a < b`, in order `(0,1), (0,2), ..., (1,2), ...`.
    pub pairwise_jaccard: Vec<f64>,
    pub pairwise_consistency: Vec<f64>,
    pub selection_frequency: Vec<usize>,
}

/// Averages both indices over all `B·(B−1)/2` pairs of the collection.
pub fn stability_report(c: &FeatureSubsetCollection) -> Result<StabilityReport> {
    let b = c.b();
    if b < 2 {
        return Err(CoxError::contract(format!(
            "stability needs at least 2 subsets, got {b}"
        )));
    }
    let mut pairwise_jaccard = Vec::with_capacity(b * (b - 1) / 2);
    let mut pairwise_consistency = Vec::with_capacity(b * (b - 1) / 2);
    for i in 0..b {
        for j in i + 1..b {
            let (si, sj) = (&c.subsets[i], &c.subsets[j]);
            pairwise_jaccard.push(jaccard_sorted(si, sj));
            pairwise_consistency.push(consistency_from_overlap(intersection_size(si, sj), c.k, c.d));
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let mut selection_frequency = vec![0; c.d];
    for s in &c.subsets {
        for &i in s {
            selection_frequency[i] += 1;
        }
    }
    Ok(StabilityReport {
        b,
        k: c.k,
        d: c.d,
        mean_jaccard: mean(&pairwise_jaccard),
        mean_consistency: mean(&pairwise_consistency),
        pairwise_jaccard,
        pairwise_consistency,
        selection_frequency,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub alpha: f64,
    pub beta: f64,
    pub replicates: usize,
    pub seed: u64,
    /// Re-standardize each replicate before fitting.
    pub standardize: bool,
    pub fit: FitOptions,
}

impl BootstrapConfig {
    pub fn new(alpha: f64, beta: f64, replicates: usize, seed: u64) -> Self {
        BootstrapConfig {
            alpha,
            beta,
            replicates,
            seed,
            standardize: true,
            fit: FitOptions::default(),
        }
    }
}

/// Importances of every bootstrap replicate, in replicate order. Subsets for
/// any `k` can be cut from the same run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapRun {
    pub d: usize,
    pub importances: Vec<Vec<f64>>,
    pub nonzeros: Vec<usize>,
}

impl BootstrapRun {
    pub fn subsets(&self, k: usize) -> Result<FeatureSubsetCollection> {
        let subsets = self
            .importances
            .iter()
            .map(|imp| top_k(imp, k))
            .collect::<Result<Vec<_>>>()?;
        FeatureSubsetCollection::new(self.d, k, subsets)
    }

    pub fn report(&self, k: usize) -> Result<(FeatureSubsetCollection, StabilityReport)> {
        let c = self.subsets(k)?;
        let r = stability_report(&c)?;
        Ok((c, r))
    }
}

fn replicate_rng(seed: u64, replicate: usize, attempt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((attempt << 32) | replicate as u64);
    rng
}

/// Row indices drawn for one bootstrap replicate attempt.
pub fn replicate_rows(n: usize, seed: u64, replicate: usize, attempt: u64) -> Vec<usize> {
    let mut rng = replicate_rng(seed, replicate, attempt);
    (0..n).map(|_| rng.random_range(0..n as u64) as usize).collect()
}

fn run_replicate(
    ds: &SurvivalDataset,
    l: &Laplacian,
    cfg: &BootstrapConfig,
    b: usize,
) -> Result<(Vec<f64>, usize)> {
    for attempt in 0..MAX_REPLICATE_ATTEMPTS {
        let rows = replicate_rows(ds.n(), cfg.seed, b, attempt);
        let sample = ds.resample(&rows)?;
        if sample.q() == 0 {
            continue;
        }
        let sample = if cfg.standardize {
            sample.standardize()?
        } else {
            sample
        };
        let model = fit(&sample, l, cfg.alpha, cfg.beta, &cfg.fit)?;
        return Ok((importance(&model, &sample)?, model.nonzero_count()));
    }
    Err(CoxError::contract(format!(
        "bootstrap replicate {b} drew no uncensored observations in {MAX_REPLICATE_ATTEMPTS} attempts"
    )))
}

/// Fits all bootstrap replicates. Replicates run in parallel when the
/// `parallel` feature is on; results are collected in replicate order.
pub fn bootstrap_importances(
    ds: &SurvivalDataset,
    l: &Laplacian,
    cfg: &BootstrapConfig,
) -> Result<BootstrapRun> {
    if cfg.replicates < 2 {
        return Err(CoxError::contract(format!(
            "need at least 2 bootstrap replicates, got {}",
            cfg.replicates
        )));
    }
    if l.p() != ds.p() {
        return Err(CoxError::contract(format!(
            "Laplacian has dimension {}, dataset has {} features",
            l.p(),
            ds.p()
        )));
    }
    cfg.fit.validate()?;
    crate::cox::check_penalties(cfg.alpha, cfg.beta)?;

    #[cfg(feature = "parallel")]
    let results: Vec<Result<(Vec<f64>, usize)>> = {
        use rayon::prelude::*;
        (0..cfg.replicates)
            .into_par_iter()
            .map(|b| run_replicate(ds, l, cfg, b))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<(Vec<f64>, usize)>> = (0..cfg.replicates)
        .map(|b| run_replicate(ds, l, cfg, b))
        .collect();

    let (importances, nonzeros) = results.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    Ok(BootstrapRun {
        d: ds.p(),
        importances,
        nonzeros,
    })
}

pub fn bootstrap_stability(
    ds: &SurvivalDataset,
    l: &Laplacian,
    cfg: &BootstrapConfig,
    k: usize,
) -> Result<(FeatureSubsetCollection, StabilityReport)> {
    if k == 0 || k >= ds.p() {
        return Err(CoxError::contract(format!(
            "top-k needs 1 <= k < p, got k = {k}, p = {}",
            ds.p()
        )));
    }
    bootstrap_importances(ds, l, cfg)?.report(k)
}
