//! Reference implementations used as test oracles. Everything here is
//! written from the definitions with no shared code paths: risk sets are
//! rescanned per event, the graph penalty is summed over the dense adjacency,
//! and the unpenalized maximizer is a damped Newton method.
#![allow(dead_code)]

use std::collections::HashSet;

use coxstab::{FeatureGraph, FeatureMeta, SurvivalDataset};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn meta(p: usize) -> Vec<FeatureMeta> {
    (0..p)
        .map(|j| FeatureMeta::new(j, format!("f{j}"), format!("C{j:03}"), 1, format!("e{j}")))
        .collect()
}

/// Log partial likelihood with Breslow risk sets, O(n²·p).
pub fn brute_loglik(w: &[f64], x: &Array2<f64>, times: &[f64], events: &[bool]) -> f64 {
    let n = times.len();
    let eta: Vec<f64> = (0..n)
        .map(|i| x.row(i).iter().zip(w).map(|(a, b)| a * b).sum())
        .collect();
    let mut ll = 0.0;
    for l in 0..n {
        if !events[l] {
            continue;
        }
        let risk: Vec<f64> = (0..n).filter(|&j| times[j] >= times[l]).map(|j| eta[j]).collect();
        let m = risk.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + risk.iter().map(|e| (e - m).exp()).sum::<f64>().ln();
        ll += eta[l] - lse;
    }
    ll
}

/// Gradient and Hessian of the log partial likelihood, from the definition.
pub fn brute_grad_hess(
    w: &[f64],
    x: &Array2<f64>,
    times: &[f64],
    events: &[bool],
) -> (Vec<f64>, Array2<f64>) {
    let (n, p) = x.dim();
    let eta: Vec<f64> = (0..n)
        .map(|i| x.row(i).iter().zip(w).map(|(a, b)| a * b).sum())
        .collect();
    let mut g = vec![0.0; p];
    let mut h = Array2::zeros((p, p));
    for l in 0..n {
        if !events[l] {
            continue;
        }
        let risk: Vec<usize> = (0..n).filter(|&j| times[j] >= times[l]).collect();
        let m = risk.iter().map(|&j| eta[j]).fold(f64::NEG_INFINITY, f64::max);
        let wts: Vec<f64> = risk.iter().map(|&j| (eta[j] - m).exp()).collect();
        let s0: f64 = wts.iter().sum();
        let mut mean = vec![0.0; p];
        for (&j, &e) in risk.iter().zip(&wts) {
            for a in 0..p {
                mean[a] += e * x[[j, a]] / s0;
            }
        }
        for a in 0..p {
            g[a] += x[[l, a]] - mean[a];
        }
        for (&j, &e) in risk.iter().zip(&wts) {
            for a in 0..p {
                for b in 0..p {
                    h[[a, b]] -= e / s0 * (x[[j, a]] - mean[a]) * (x[[j, b]] - mean[b]);
                }
            }
        }
    }
    (g, h)
}

/// `(1/2)·Σ over ordered pairs A_ij (w_i − w_j)²` from the dense adjacency.
pub fn brute_graph_penalty(a: &Array2<f64>, w: &[f64]) -> f64 {
    let p = w.len();
    let mut s = 0.0;
    for i in 0..p {
        for j in 0..p {
            s += a[[i, j]] * (w[i] - w[j]).powi(2);
        }
    }
    0.5 * s
}

fn solve(mut a: Array2<f64>, mut b: Vec<f64>) -> Vec<f64> {
    // Gaussian elimination with partial pivoting.
    let n = b.len();
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j| a[[i, c]].abs().total_cmp(&a[[j, c]].abs()))
            .unwrap();
        for k in 0..n {
            let t = a[[c, k]];
            a[[c, k]] = a[[piv, k]];
            a[[piv, k]] = t;
        }
        b.swap(c, piv);
        for r in c + 1..n {
            let f = a[[r, c]] / a[[c, c]];
            for k in c..n {
                a[[r, k]] -= f * a[[c, k]];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[[r, k]] * x[k]).sum();
        x[r] = (b[r] - s) / a[[r, r]];
    }
    x
}

/// Maximizes the unpenalized log partial likelihood by damped Newton.
/// Returns `None` if it fails to converge (e.g. the maximizer is at infinity).
pub fn newton_max(x: &Array2<f64>, times: &[f64], events: &[bool]) -> Option<(Vec<f64>, f64)> {
    let p = x.ncols();
    let mut w = vec![0.0; p];
    let mut f = brute_loglik(&w, x, times, events);
    for _ in 0..200 {
        let (g, h) = brute_grad_hess(&w, x, times, events);
        if g.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-12 {
            return Some((w, f));
        }
        let neg_h = h.mapv(|v| -v);
        let dir = solve(neg_h, g);
        let mut t = 1.0;
        loop {
            let cand: Vec<f64> = w.iter().zip(&dir).map(|(a, d)| a + t * d).collect();
            let fc = brute_loglik(&cand, x, times, events);
            if fc >= f - 1e-14 {
                w = cand;
                f = fc;
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                return Some((w, f));
            }
        }
        if w.iter().any(|v| v.abs() > 1e3) {
            return None;
        }
    }
    None
}

/// Random survival instance: standard-normal features, exponential times
/// with a random signal, independent censoring with probability `censor`.
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    n: usize,
    p: usize,
    censor: f64,
) -> (Array2<f64>, Vec<f64>, Vec<bool>) {
    let mut x = Array2::zeros((n, p));
    for v in x.iter_mut() {
        *v = rng.sample::<f64, _>(rand_distr::StandardNormal);
    }
    let w: Vec<f64> = (0..p).map(|_| rng.random_range(-0.5..0.5)).collect();
    let mut times = Vec::with_capacity(n);
    let mut events = Vec::with_capacity(n);
    for i in 0..n {
        let eta: f64 = x.row(i).iter().zip(&w).map(|(a, b)| a * b).sum();
        let u: f64 = rng.sample(rand_distr::Open01);
        times.push(-u.ln() / eta.exp());
        events.push(rng.random::<f64>() >= censor);
    }
    if !events.iter().any(|&e| e) {
        events[0] = true;
    }
    (x, times, events)
}

pub fn random_graph(rng: &mut ChaCha8Rng, p: usize, density: f64) -> FeatureGraph {
    let mut edges = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            if rng.random::<f64>() < density {
                edges.push((i, j));
            }
        }
    }
    FeatureGraph::from_edges(p, edges).unwrap()
}

pub fn dataset(x: Array2<f64>, times: Vec<f64>, events: Vec<bool>) -> SurvivalDataset {
    let p = x.ncols();
    SurvivalDataset::new(x, times, events, meta(p)).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mean Jaccard and consistency over all pairs, by explicit set operations.
pub fn brute_stability(subsets: &[Vec<usize>], k: usize, d: usize) -> (f64, f64) {
    let sets: Vec<HashSet<usize>> = subsets.iter().map(|s| s.iter().cloned().collect()).collect();
    let mut jac = Vec::new();
    let mut con = Vec::new();
    for a in 0..sets.len() {
        for b in a + 1..sets.len() {
            let r = sets[a].intersection(&sets[b]).count();
            let u = sets[a].union(&sets[b]).count();
            jac.push(r as f64 / u as f64);
            let (r, k, d) = (r as f64, k as f64, d as f64);
            con.push((r * d - k * k) / (k * (d - k)));
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    (mean(&jac), mean(&con))
}

/// Pair-counting AUC: concordant pairs plus half the ties.
pub fn brute_auc(scores: &[f64], positive: &[bool]) -> f64 {
    let mut twice_u = 0u64;
    let (mut np, mut nn) = (0u64, 0u64);
    for (i, &pi) in positive.iter().enumerate() {
        if pi {
            np += 1;
        } else {
            nn += 1;
        }
        if !pi {
            continue;
        }
        for (j, &pj) in positive.iter().enumerate() {
            if pj {
                continue;
            }
            if scores[i] > scores[j] {
                twice_u += 2;
            } else if scores[i] == scores[j] {
                twice_u += 1;
            }
        }
    }
    (twice_u as f64 / 2.0) / (np as f64 * nn as f64)
}
