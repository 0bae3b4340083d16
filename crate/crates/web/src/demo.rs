//! The demo's three operations over one synthetic dataset: fit at a chosen
//! (α, β), the sparsity path over α, and bootstrap stability curves for
//! β = 0 against a chosen β. Everything returns plain serializable structs;
//! the wasm layer only converts them to JSON.

use coxstab::report::{stability_curve, CurvePoint};
use coxstab::{
    bootstrap_importances, build_graph, fit, fit_from, generate, BootstrapConfig, FitOptions,
    Laplacian, Result, SurvivalDataset, SynthConfig, SynthTruth,
};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct FeatureInfo {
    pub name: String,
    pub code: String,
    /// Planted group, `None` for noise.
    pub group: Option<usize>,
    pub true_weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetView {
    pub n: usize,
    pub p: usize,
    pub events: usize,
    pub censored_fraction: f64,
    pub edges: usize,
    pub features: Vec<FeatureInfo>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitView {
    pub alpha: f64,
    pub beta: f64,
    pub weights: Vec<f64>,
    pub nonzero: usize,
    pub n_iter: usize,
    pub converged: bool,
    pub objective: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathView {
    pub beta: f64,
    /// Decreasing.
    pub alphas: Vec<f64>,
    pub nonzero: Vec<usize>,
    /// One weight vector per α.
    pub weights: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityView {
    pub alpha: f64,
    pub beta: f64,
    pub replicates: usize,
    pub lasso: Vec<CurvePoint>,
    pub graph: Vec<CurvePoint>,
}

pub struct Session {
    raw: SurvivalDataset,
    ds: SurvivalDataset,
    laplacian: Laplacian,
    truth: SynthTruth,
    edges: usize,
}

impl Session {
    /// Shipped synthetic layout with the given size, within-group
    /// correlation and seed.
    pub fn new(n: usize, within_corr: f64, seed: u64) -> Result<Self> {
        let cfg = SynthConfig {
            n,
            within_corr,
            seed,
            ..SynthConfig::shipped()
        };
        let (raw, truth) = generate(&cfg)?;
        let ds = raw.standardize()?;
        let graph = build_graph(ds.meta(), truth.code_prefix_len)?;
        Ok(Session {
            raw,
            ds,
            laplacian: Laplacian::new(&graph),
            edges: graph.edge_count(),
            truth,
        })
    }

    pub fn dataset(&self) -> DatasetView {
        DatasetView {
            n: self.ds.n(),
            p: self.ds.p(),
            events: self.ds.q(),
            censored_fraction: self.truth.censored_fraction,
            edges: self.edges,
            features: self
                .ds
                .meta()
                .iter()
                .enumerate()
                .map(|(i, m)| FeatureInfo {
                    name: m.name.clone(),
                    code: m.code.clone(),
                    group: self.truth.groups[i],
                    true_weight: self.truth.weights[i],
                })
                .collect(),
        }
    }

    pub fn fit(&self, alpha: f64, beta: f64) -> Result<FitView> {
        let m = fit(&self.ds, &self.laplacian, alpha, beta, &FitOptions::default())?;
        Ok(FitView {
            alpha,
            beta,
            nonzero: m.nonzero_count(),
            n_iter: m.n_iter,
            converged: m.converged,
            objective: m.final_objective().unwrap_or(f64::NAN),
            weights: m.weights,
        })
    }

    /// Log-spaced α from `alpha_max` down to `alpha_min`, each fit warm
    /// started from the previous one.
    pub fn path(&self, beta: f64, alpha_min: f64, alpha_max: f64, steps: usize) -> Result<PathView> {
        if !(alpha_min > 0.0 && alpha_max > alpha_min && steps >= 2) {
            return Err(coxstab::CoxError::contract(format!(
                "need 0 < alpha_min < alpha_max and at least 2 steps, got {alpha_min}, {alpha_max}, {steps}"
            )));
        }
        let ratio = (alpha_min / alpha_max).ln() / (steps - 1) as f64;
        let alphas: Vec<f64> = (0..steps).map(|i| alpha_max * (ratio * i as f64).exp()).collect();
        let mut w = vec![0.0; self.ds.p()];
        let mut nonzero = Vec::with_capacity(steps);
        let mut weights = Vec::with_capacity(steps);
        for &a in &alphas {
            let m = fit_from(&self.ds, &self.laplacian, a, beta, &FitOptions::default(), &w)?;
            nonzero.push(m.nonzero_count());
            w = m.weights;
            weights.push(w.clone());
        }
        Ok(PathView {
            beta,
            alphas,
            nonzero,
            weights,
        })
    }

    /// Jaccard and consistency over k = 1..p−1 for β = 0 and for `beta`,
    /// from the same bootstrap draws.
    pub fn stability(&self, alpha: f64, beta: f64, replicates: usize, seed: u64) -> Result<StabilityView> {
        let ks: Vec<usize> = (1..self.ds.p()).collect();
        let curve = |b: f64| -> Result<Vec<CurvePoint>> {
            let run = bootstrap_importances(
                &self.raw,
                &self.laplacian,
                &BootstrapConfig::new(alpha, b, replicates, seed),
            )?;
            stability_curve(&run, &ks)
        };
        Ok(StabilityView {
            alpha,
            beta,
            replicates,
            lasso: curve(0.0)?,
            graph: curve(beta)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session() -> Session {
        Session::new(200, 0.9, 3).unwrap()
    }

    #[test]
    fn dataset_view_describes_groups() {
        let v = session().dataset();
        assert_eq!(v.p, 60);
        assert_eq!(v.edges, 60);
        assert_eq!(v.features.iter().filter(|f| f.group == Some(0)).count(), 5);
        assert_eq!(v.features[0].true_weight, 0.5);
    }

    #[test]
    fn path_is_sparser_at_large_alpha() {
        let p = session().path(0.5, 0.002, 0.3, 8).unwrap();
        assert_eq!(p.alphas.len(), 8);
        assert!(p.alphas.windows(2).all(|w| w[1] < w[0]));
        assert!(p.nonzero[0] < p.nonzero[7], "{:?}", p.nonzero);
        assert!(session().path(0.5, 0.3, 0.002, 8).is_err());
    }

    #[test]
    fn path_end_matches_cold_fit() {
        let s = session();
        let p = s.path(0.5, 0.02, 0.2, 4).unwrap();
        let cold = s.fit(0.02, 0.5).unwrap();
        for (a, b) in p.weights[3].iter().zip(&cold.weights) {
            assert!((a - b).abs() < 1e-2, "{a} vs {b}");
        }
    }

    #[test]
    fn graph_curve_is_more_stable() {
        let v = session().stability(0.02, 0.5, 10, 1).unwrap();
        assert_eq!(v.lasso.len(), 59);
        let mean = |c: &[CurvePoint]| c[..15].iter().map(|p| p.mean_consistency).sum::<f64>() / 15.0;
        assert!(mean(&v.graph) > mean(&v.lasso));
    }

    #[test]
    fn views_serialize() {
        let s = session();
        let json = serde_json::to_string(&s.fit(0.05, 0.1).unwrap()).unwrap();
        assert!(json.contains("\"nonzero\""));
    }
}
