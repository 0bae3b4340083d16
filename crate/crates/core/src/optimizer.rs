//! Proximal gradient ascent (ISTA) for the penalized Cox objective.
//!
//! Each iteration takes a gradient step on the smooth part and applies the
//! soft-thresholding operator for the L1 term. The step length is found by
//! backtracking from `step_init` until the full objective does not decrease,
//! so the objective trace is monotone.

use serde::{Deserialize, Serialize};

use crate::cox::{check_penalties, objective_unchecked, smooth_gradient_unchecked};
use crate::data::{Standardization, SurvivalDataset};
use crate::error::{CoxError, Result};
use crate::graph::Laplacian;

/// Hard cap on step halvings within one iteration. With the default
/// shrink factor this reaches steps near 1e-18, below which no ascent is
/// representable.
const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Relative objective change below which iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    pub step_init: f64,
    pub step_shrink: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol: 1e-7,
            max_iter: 10_000,
            step_init: 1.0,
            step_shrink: 0.5,
        }
    }
}

impl FitOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(CoxError::contract(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(CoxError::contract("max_iter must be at least 1"));
        }
        if !(self.step_init > 0.0 && self.step_init.is_finite()) {
            return Err(CoxError::contract(format!(
                "step_init must be > 0, got {}",
                self.step_init
            )));
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(CoxError::contract(format!(
                "step_shrink must lie in (0, 1), got {}",
                self.step_shrink
            )));
        }
        Ok(())
    }
}

/// A fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoxModel {
    pub weights: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub n_iter: usize,
    pub converged: bool,
    /// Objective value at the start and after every accepted step.
    #[serde(default, skip_serializing)]
    pub objective_trace: Vec<f64>,
    pub feature_names: Vec<String>,
    /// Means/sds of the training data, needed to score new raw data.
    pub standardization: Option<Standardization>,
}

impl CoxModel {
    pub fn nonzero_count(&self) -> usize {
        self.weights.iter().filter(|w| **w != 0.0).count()
    }

    pub fn final_objective(&self) -> Option<f64> {
        self.objective_trace.last().copied()
    }
}

/// `sign(v)·max(|v| − t, 0)`.
pub fn soft_threshold(v: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(CoxError::contract(format!("threshold must be >= 0, got {t}")));
    }
    Ok(shrink(v, t))
}

#[inline]
fn shrink(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Fits from `w = 0`.
pub fn fit(
    ds: &SurvivalDataset,
    l: &Laplacian,
    alpha: f64,
    beta: f64,
    opts: &FitOptions,
) -> Result<CoxModel> {
    fit_from(ds, l, alpha, beta, opts, &vec![0.0; ds.p()])
}

/// Fits starting from the given weights.
pub fn fit_from(
    ds: &SurvivalDataset,
    l: &Laplacian,
    alpha: f64,
    beta: f64,
    opts: &FitOptions,
    init: &[f64],
) -> Result<CoxModel> {
    opts.validate()?;
    check_penalties(alpha, beta)?;
    if init.len() != ds.p() || l.p() != ds.p() {
        return Err(CoxError::contract(format!(
            "dimension mismatch: {} features, {} initial weights, Laplacian of dimension {}",
            ds.p(),
            init.len(),
            l.p()
        )));
    }
    if ds.q() == 0 {
        return Err(CoxError::NoEvents);
    }

    let mut w = init.to_vec();
    let mut f = objective_unchecked(&w, ds, l, alpha, beta).total;
    if !f.is_finite() {
        return Err(CoxError::Numerical {
            iteration: 0,
            message: format!("objective is {f} at the initial point"),
        });
    }
    let mut trace = vec![f];
    let mut converged = false;
    let mut n_iter = 0;
    let mut candidate = vec![0.0; w.len()];

    while n_iter < opts.max_iter {
        n_iter += 1;
        let (_, grad) = smooth_gradient_unchecked(&w, ds, l, beta);
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(CoxError::Numerical {
                iteration: n_iter,
                message: "non-finite gradient".into(),
            });
        }

        let mut step = opts.step_init;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            for ((c, &wi), &gi) in candidate.iter_mut().zip(&w).zip(&grad) {
                *c = shrink(wi + step * gi, step * alpha);
            }
            let f_new = objective_unchecked(&candidate, ds, l, alpha, beta).total;
            if f_new.is_nan() {
                return Err(CoxError::Numerical {
                    iteration: n_iter,
                    message: "objective evaluated to NaN".into(),
                });
            }
            if f_new >= f {
                accepted = Some(f_new);
                break;
            }
            step *= opts.step_shrink;
        }

        // No representable ascent step: w is stationary to machine precision.
        let Some(f_new) = accepted else {
            converged = true;
            break;
        };
        std::mem::swap(&mut w, &mut candidate);
        let rel_change = (f_new - f).abs() / f.abs().max(f64::MIN_POSITIVE);
        f = f_new;
        trace.push(f);
        if rel_change < opts.tol {
            converged = true;
            break;
        }
    }

    Ok(CoxModel {
        weights: w,
        alpha,
        beta,
        n_iter,
        converged,
        objective_trace: trace,
        feature_names: ds.feature_names(),
        standardization: ds.standardization().cloned(),
    })
}
