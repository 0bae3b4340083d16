//! Cox log partial likelihood, the graph- and L1-penalized objective, and the
//! gradient of its smooth part.
//!
//! The objective that is maximized is
//!
//! ```text
//! F(w) = ℓ(w)/n − α‖w‖₁ − (β/2)·wᵀLw
//! ℓ(w) = Σ_{events l} [ wᵀx_l − log Σ_{j: t_j ≥ t_l} exp(wᵀx_j) ]
//! ```
//!
//! Tied times share one risk set (Breslow). Risk-set sums are accumulated in
//! a single reverse pass over the time-sorted rows with a running max-shift,
//! so an evaluation costs O(n·p).

use serde::{Deserialize, Serialize};

use crate::data::SurvivalDataset;
use crate::error::{CoxError, Result};
use crate::graph::Laplacian;

/// The four pieces of the penalized objective at one weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoxObjectiveParts {
    /// Log partial likelihood (not divided by n).
    pub loglik: f64,
    /// `Σ |w_i|`.
    pub l1: f64,
    /// `wᵀLw`.
    pub graph: f64,
    /// `loglik/n − α·l1 − (β/2)·graph`.
    pub total: f64,
}

fn check_weights(w: &[f64], ds: &SurvivalDataset) -> Result<()> {
    if w.len() != ds.p() {
        return Err(CoxError::contract(format!(
            "weight vector has length {}, dataset has {} features",
            w.len(),
            ds.p()
        )));
    }
    if ds.q() == 0 {
        return Err(CoxError::NoEvents);
    }
    Ok(())
}

fn check_laplacian(l: &Laplacian, ds: &SurvivalDataset) -> Result<()> {
    if l.p() != ds.p() {
        return Err(CoxError::contract(format!(
            "Laplacian has dimension {}, dataset has {} features",
            l.p(),
            ds.p()
        )));
    }
    Ok(())
}

pub(crate) fn check_penalties(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(CoxError::contract(format!("alpha must be > 0, got {alpha}")));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(CoxError::contract(format!("beta must be >= 0, got {beta}")));
    }
    Ok(())
}

/// Log partial likelihood and, optionally, its gradient. Inputs are assumed
/// validated.
pub(crate) fn loglik_and_grad(
    w: &[f64],
    ds: &SurvivalDataset,
    want_grad: bool,
) -> (f64, Option<Vec<f64>>) {
    let n = ds.n();
    let p = ds.p();
    let x = ds.x();
    let times = ds.times();
    let events = ds.events();
    let w = ndarray::ArrayView1::from(w);
    let eta: Vec<f64> = (0..n).map(|i| x.row(i).dot(&w)).collect();

    let mut shift = f64::NEG_INFINITY;
    let mut s0 = 0.0;
    let mut s1 = vec![0.0; if want_grad { p } else { 0 }];
    let mut loglik = 0.0;
    let mut grad = vec![0.0; if want_grad { p } else { 0 }];

    let mut end = n;
    while end > 0 {
        // Block of tied times [start, end).
        let t = times[end - 1];
        let mut start = end - 1;
        while start > 0 && times[start - 1] == t {
            start -= 1;
        }

        for j in start..end {
            if eta[j] > shift {
                let rescale = (shift - eta[j]).exp();
                s0 *= rescale;
                s1.iter_mut().for_each(|v| *v *= rescale);
                shift = eta[j];
            }
            let e = (eta[j] - shift).exp();
            s0 += e;
            if want_grad {
                for (acc, &xv) in s1.iter_mut().zip(x.row(j).iter()) {
                    *acc += e * xv;
                }
            }
        }

        let log_denominator = shift + s0.ln();
        let mut block_events = 0usize;
        for l in start..end {
            if events[l] {
                block_events += 1;
                loglik += eta[l] - log_denominator;
                if want_grad {
                    for (g, &xv) in grad.iter_mut().zip(x.row(l).iter()) {
                        *g += xv;
                    }
                }
            }
        }
        if want_grad && block_events > 0 {
            let d = block_events as f64;
            for (g, &acc) in grad.iter_mut().zip(s1.iter()) {
                *g -= d * acc / s0;
            }
        }
        end = start;
    }
    (loglik, want_grad.then_some(grad))
}

pub fn log_partial_likelihood(w: &[f64], ds: &SurvivalDataset) -> Result<f64> {
    check_weights(w, ds)?;
    Ok(loglik_and_grad(w, ds, false).0)
}

pub fn objective(
    w: &[f64],
    ds: &SurvivalDataset,
    l: &Laplacian,
    alpha: f64,
    beta: f64,
) -> Result<CoxObjectiveParts> {
    check_weights(w, ds)?;
    check_laplacian(l, ds)?;
    check_penalties(alpha, beta)?;
    Ok(objective_unchecked(w, ds, l, alpha, beta))
}

pub(crate) fn objective_unchecked(
    w: &[f64],
    ds: &SurvivalDataset,
    l: &Laplacian,
    alpha: f64,
    beta: f64,
) -> CoxObjectiveParts {
    let loglik = loglik_and_grad(w, ds, false).0;
    let l1 = w.iter().map(|v| v.abs()).sum();
    let graph = l.quad_form_unchecked(w);
    CoxObjectiveParts {
        loglik,
        l1,
        graph,
        total: loglik / ds.n() as f64 - alpha * l1 - 0.5 * beta * graph,
    }
}

/// The differentiable part of the objective, `ℓ(w)/n − (β/2)·wᵀLw`.
pub fn smooth_objective(w: &[f64], ds: &SurvivalDataset, l: &Laplacian, beta: f64) -> Result<f64> {
    check_weights(w, ds)?;
    check_laplacian(l, ds)?;
    let loglik = loglik_and_grad(w, ds, false).0;
    Ok(loglik / ds.n() as f64 - 0.5 * beta * l.quad_form_unchecked(w))
}

/// Gradient of [`smooth_objective`]: `∇ℓ(w)/n − β·L·w`.
///
/// The L1 term is left to the proximal step of the optimizer.
pub fn smooth_gradient(
    w: &[f64],
    ds: &SurvivalDataset,
    l: &Laplacian,
    beta: f64,
) -> Result<Vec<f64>> {
    check_weights(w, ds)?;
    check_laplacian(l, ds)?;
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(CoxError::contract(format!("beta must be >= 0, got {beta}")));
    }
    Ok(smooth_gradient_unchecked(w, ds, l, beta).1)
}

/// Returns the log partial likelihood alongside the smooth gradient.
pub(crate) fn smooth_gradient_unchecked(
    w: &[f64],
    ds: &SurvivalDataset,
    l: &Laplacian,
    beta: f64,
) -> (f64, Vec<f64>) {
    let (loglik, grad) = loglik_and_grad(w, ds, true);
    let mut grad = grad.expect("gradient requested");
    let inv_n = 1.0 / ds.n() as f64;
    let lw = l.mul_vec_unchecked(w);
    for (g, lwi) in grad.iter_mut().zip(lw) {
        *g = *g * inv_n - beta * lwi;
    }
    (loglik, grad)
}
