//! Synthetic survival data with correlated feature groups and planted code
//! structure.
//!
//! Group `g` shares a latent factor `z_g`: member features are
//! `√ρ·z_g + √(1−ρ)·ε`, so any two members correlate at `ρ`. Event times
//! follow an exponential proportional-hazards model
//! `T = −log(U) / (λ·exp(wᵀx))`, and independent exponential censoring is
//! calibrated by bisection so the expected censored fraction matches
//! `censor_rate`.
//!
//! Group members get codes `G<g>.<m>` and event key `G<g>` with distinct
//! windows; noise features get `N<j>.0`. Indices are zero-padded to a common
//! width, so `build_graph` with [`SynthTruth::code_prefix_len`] recovers
//! exactly the group cliques.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{FeatureMeta, SurvivalDataset};
use crate::error::{CoxError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSpec {
    /// One coefficient per group, applied to every member; noise features
    /// get zero.
    PerGroup(Vec<f64>),
    /// A coefficient for every feature (groups first, then noise).
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n: usize,
    pub n_groups: usize,
    pub group_size: usize,
    pub within_corr: f64,
    pub n_noise: usize,
    pub true_weights: WeightSpec,
    pub baseline_rate: f64,
    pub censor_rate: f64,
    pub seed: u64,
}

impl SynthConfig {
    /// Six groups of five features at ρ = 0.9 plus 30 independent noise
    /// features, 300 subjects, 20% censoring. Baseline median survival is 182
    /// time units.
    pub fn shipped() -> Self {
        SynthConfig {
            n: 300,
            n_groups: 6,
            group_size: 5,
            within_corr: 0.9,
            n_noise: 30,
            true_weights: WeightSpec::PerGroup(vec![0.5, -0.4, 0.3, 0.0, 0.0, 0.0]),
            baseline_rate: std::f64::consts::LN_2 / 182.0,
            censor_rate: 0.2,
            seed: 20_140_917,
        }
    }

    pub fn p(&self) -> usize {
        self.n_groups * self.group_size + self.n_noise
    }

    pub fn validate(&self) -> Result<()> {
        if self.p() < 2 {
            return Err(CoxError::contract(format!(
                "synthetic data needs at least 2 features, got {}",
                self.p()
            )));
        }
        if self.n == 0 {
            return Err(CoxError::contract("n must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.within_corr) {
            return Err(CoxError::contract(format!(
                "within-group correlation must lie in [0, 1), got {}",
                self.within_corr
            )));
        }
        if !(self.baseline_rate > 0.0 && self.baseline_rate.is_finite()) {
            return Err(CoxError::contract(format!(
                "baseline rate must be > 0, got {}",
                self.baseline_rate
            )));
        }
        if !(0.0..1.0).contains(&self.censor_rate) {
            return Err(CoxError::contract(format!(
                "censor rate must lie in [0, 1), got {}",
                self.censor_rate
            )));
        }
        match &self.true_weights {
            WeightSpec::PerGroup(g) if g.len() != self.n_groups => Err(CoxError::contract(format!(
                "{} group weights for {} groups",
                g.len(),
                self.n_groups
            ))),
            WeightSpec::Explicit(w) if w.len() != self.p() => Err(CoxError::contract(format!(
                "{} explicit weights for {} features",
                w.len(),
                self.p()
            ))),
            _ => Ok(()),
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        match &self.true_weights {
            WeightSpec::PerGroup(g) => g
                .iter()
                .flat_map(|&w| std::iter::repeat_n(w, self.group_size))
                .chain(std::iter::repeat_n(0.0, self.n_noise))
                .collect(),
            WeightSpec::Explicit(w) => w.clone(),
        }
    }
}

/// What the generator planted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthTruth {
    pub weights: Vec<f64>,
    /// Group index of every feature; `None` for noise.
    pub groups: Vec<Option<usize>>,
    /// Prefix length at which code edges coincide with the groups.
    pub code_prefix_len: usize,
    /// Rate of the exponential censoring distribution.
    pub censoring_rate_parameter: f64,
    pub censored_fraction: f64,
    pub config: SynthConfig,
}

fn digits(mut v: usize) -> usize {
    let mut d = 1;
    while v >= 10 {
        v /= 10;
        d += 1;
    }
    d
}

fn feature_meta(cfg: &SynthConfig) -> (Vec<FeatureMeta>, Vec<Option<usize>>, usize) {
    let width = digits(cfg.n_groups.max(cfg.n_noise).saturating_sub(1));
    let mut meta = Vec::with_capacity(cfg.p());
    let mut groups = Vec::with_capacity(cfg.p());
    for g in 0..cfg.n_groups {
        let key = format!("G{g:0width$}");
        for m in 0..cfg.group_size {
            meta.push(FeatureMeta::new(
                meta.len(),
                format!("g{g}_{m}"),
                format!("{key}.{m}"),
                m as u32 + 1,
                key.clone(),
            ));
            groups.push(Some(g));
        }
    }
    for j in 0..cfg.n_noise {
        let key = format!("N{j:0width$}");
        meta.push(FeatureMeta::new(
            meta.len(),
            format!("noise{j}"),
            format!("{key}.0"),
            1,
            key,
        ));
        groups.push(None);
    }
    (meta, groups, width + 1)
}

/// Expected censored fraction `mean(1 − exp(−μ·T_i))` is increasing in μ;
/// solve for the target by bisection.
fn calibrate_censoring(event_times: &[f64], target: f64) -> f64 {
    if target <= 0.0 {
        return 0.0;
    }
    let frac = |mu: f64| {
        event_times.iter().map(|t| 1.0 - (-mu * t).exp()).sum::<f64>() / event_times.len() as f64
    };
    let mean_t = event_times.iter().sum::<f64>() / event_times.len() as f64;
    let mut hi = 1.0 / mean_t.max(f64::MIN_POSITIVE);
    while frac(hi) < target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if frac(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn generate(cfg: &SynthConfig) -> Result<(SurvivalDataset, SynthTruth)> {
    cfg.validate()?;
    let p = cfg.p();
    let n = cfg.n;
    let weights = cfg.weights();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let shared = cfg.within_corr.sqrt();
    let own = (1.0 - cfg.within_corr).sqrt();
    let mut x = Array2::zeros((n, p));
    for i in 0..n {
        let mut j = 0;
        for _ in 0..cfg.n_groups {
            let z: f64 = rng.sample(StandardNormal);
            for _ in 0..cfg.group_size {
                let e: f64 = rng.sample(StandardNormal);
                x[[i, j]] = shared * z + own * e;
                j += 1;
            }
        }
        for _ in 0..cfg.n_noise {
            x[[i, j]] = rng.sample(StandardNormal);
            j += 1;
        }
    }

    let event_times: Vec<f64> = (0..n)
        .map(|i| {
            let eta: f64 = x.row(i).iter().zip(&weights).map(|(a, b)| a * b).sum();
            let u: f64 = rng.sample(Open01);
            (-u.ln() / (cfg.baseline_rate * eta.exp())).max(f64::MIN_POSITIVE)
        })
        .collect();

    let mu = calibrate_censoring(&event_times, cfg.censor_rate);
    let mut times = Vec::with_capacity(n);
    let mut events = Vec::with_capacity(n);
    for &t in &event_times {
        if mu > 0.0 {
            let u: f64 = rng.sample(Open01);
            let c = (-u.ln() / mu).max(f64::MIN_POSITIVE);
            times.push(t.min(c));
            events.push(t <= c);
        } else {
            times.push(t);
            events.push(true);
        }
    }
    let censored_fraction = events.iter().filter(|e| !**e).count() as f64 / n as f64;

    let (meta, groups, code_prefix_len) = feature_meta(cfg);
    let ds = SurvivalDataset::new(x, times, events, meta)?;
    Ok((
        ds,
        SynthTruth {
            weights,
            groups,
            code_prefix_len,
            censoring_rate_parameter: mu,
            censored_fraction,
            config: cfg.clone(),
        },
    ))
}
