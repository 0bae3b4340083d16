use std::fs;
use std::path::{Path, PathBuf};

use coxstab::evaluation::{self, EvaluationReport};
use coxstab::report::{self, CurvePoint, Envelope, GridRow};
use coxstab::stability::BootstrapRun;
use coxstab::{
    bootstrap_importances, build_graph, fit, generate, load_dataset, BootstrapConfig, CoxError,
    CoxModel, FitOptions, Laplacian, Result, StabilityReport, SurvivalDataset, SynthConfig,
    WeightSpec,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::args::{
    DataArgs, EvaluateArgs, GraphExportArgs, GridArgs, ModelArgs, StabilityArgs, SynthArgs,
    TrainArgs,
};
use crate::config::RunConfig;
use crate::output::{write_provenance, OutDir};

pub const DEFAULT_SEED: u64 = 2014;

fn seed_or_default(seed: Option<u64>) -> u64 {
    seed.unwrap_or(DEFAULT_SEED)
}

fn path_string(p: &Path) -> String {
    p.display().to_string()
}

impl ModelArgs {
    fn fit_options(&self) -> FitOptions {
        FitOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            ..FitOptions::default()
        }
    }

    fn record(&self, cfg: &mut RunConfig) {
        cfg.prefix_len = Some(self.prefix_len);
        cfg.standardize = Some(!self.no_standardize);
        cfg.fit = Some(self.fit_options());
    }
}

impl DataArgs {
    fn load(&self) -> Result<SurvivalDataset> {
        load_dataset(&self.features, &self.meta)
    }

    fn record(&self, cfg: &mut RunConfig) {
        cfg.features = Some(path_string(&self.features));
        cfg.meta = Some(path_string(&self.meta));
    }
}

/// Graph Laplacian and the (optionally standardized) training matrix.
fn prepare(ds: &SurvivalDataset, m: &ModelArgs) -> Result<(SurvivalDataset, Laplacian)> {
    let graph = build_graph(ds.meta(), m.prefix_len)?;
    let ds = if m.no_standardize {
        ds.clone()
    } else {
        ds.standardize()?
    };
    Ok((ds, Laplacian::new(&graph)))
}

#[derive(Serialize)]
struct StabilityResult<'a> {
    k: usize,
    report: &'a StabilityReport,
    replicate_nonzeros: &'a [usize],
}

pub fn train(a: &TrainArgs) -> Result<()> {
    let mut cfg = RunConfig::new("train", &a.out_dir);
    a.data.record(&mut cfg);
    a.model.record(&mut cfg);
    cfg.alpha = Some(a.alpha);
    cfg.beta = Some(a.beta);
    cfg.top_k = Some(vec![a.top_k]);

    let raw = a.data.load()?;
    let (ds, l) = prepare(&raw, &a.model)?;
    let model = fit(&ds, &l, a.alpha, a.beta, &a.model.fit_options())?;
    let fit_report = report::fit_report(&model, &ds, a.top_k)?;

    let out = OutDir::create(&a.out_dir)?;
    out.write_json("model.json", &cfg, &model)?;
    out.write_json("fit_report.json", &cfg, &fit_report)?;
    eprintln!(
        "fit: {} of {} features nonzero after {} iterations (converged: {})",
        model.nonzero_count(),
        ds.p(),
        model.n_iter,
        model.converged
    );
    Ok(())
}

fn load_model(path: &Path) -> Result<CoxModel> {
    let text = fs::read_to_string(path).map_err(|e| CoxError::io(path, e))?;
    let env: Envelope<serde_json::Value, CoxModel> =
        serde_json::from_str(&text).map_err(|e| CoxError::Format {
            path: path_string(path),
            message: format!("not a model file: {e}"),
        })?;
    Ok(env.result)
}

pub fn evaluate(a: &EvaluateArgs) -> Result<()> {
    let seed = seed_or_default(a.seed);
    let mut cfg = RunConfig::new("evaluate", &a.out_dir);
    cfg.model = Some(path_string(&a.model));
    a.data.record(&mut cfg);
    cfg.horizon_days = Some(a.horizon_days);
    cfg.ci_resamples = Some(a.ci_resamples);
    cfg.seed = Some(seed);

    let model = load_model(&a.model)?;
    let ds = a.data.load()?;
    if ds.p() != model.weights.len() {
        return Err(CoxError::contract(format!(
            "model has {} weights, evaluation data has {} features",
            model.weights.len(),
            ds.p()
        )));
    }
    let report = evaluation::evaluate(&model, &ds, a.horizon_days, a.ci_resamples, seed)?;
    let out = OutDir::create(&a.out_dir)?;
    out.write_json("evaluation.json", &cfg, &report)?;
    eprintln!(
        "AUC at {} days: {:.4} [{:.4}, {:.4}]",
        report.horizon_days, report.auc, report.ci_low, report.ci_high
    );
    Ok(())
}

fn check_k(ks: &[usize], p: usize) -> Result<()> {
    if ks.is_empty() {
        return Err(CoxError::contract("at least one --top-k value is required"));
    }
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k >= p) {
        return Err(CoxError::contract(format!(
            "top-k needs 1 <= k < p, got k = {k}, p = {p}"
        )));
    }
    Ok(())
}

fn bootstrap(
    raw: &SurvivalDataset,
    l: &Laplacian,
    m: &ModelArgs,
    alpha: f64,
    beta: f64,
    replicates: usize,
    seed: u64,
) -> Result<BootstrapRun> {
    let cfg = BootstrapConfig {
        standardize: !m.no_standardize,
        fit: m.fit_options(),
        ..BootstrapConfig::new(alpha, beta, replicates, seed)
    };
    bootstrap_importances(raw, l, &cfg)
}

pub fn stability(a: &StabilityArgs) -> Result<()> {
    let seed = seed_or_default(a.seed);
    let mut cfg = RunConfig::new("stability", &a.out_dir);
    a.data.record(&mut cfg);
    a.model.record(&mut cfg);
    cfg.alpha = Some(a.alpha);
    cfg.beta = Some(a.beta);
    cfg.bootstraps = Some(a.bootstraps);
    cfg.top_k = Some(a.top_k.clone());
    cfg.seed = Some(seed);

    let raw = a.data.load()?;
    check_k(&a.top_k, raw.p())?;
    let l = Laplacian::new(&build_graph(raw.meta(), a.model.prefix_len)?);
    let run = bootstrap(&raw, &l, &a.model, a.alpha, a.beta, a.bootstraps, seed)?;

    let out = OutDir::create(&a.out_dir)?;
    let mut curve = Vec::with_capacity(a.top_k.len());
    for &k in &a.top_k {
        let (_, r) = run.report(k)?;
        out.write_json(
            &format!("stability_k{k}.json"),
            &cfg,
            StabilityResult {
                k,
                report: &r,
                replicate_nonzeros: &run.nonzeros,
            },
        )?;
        curve.push(CurvePoint {
            k,
            mean_jaccard: r.mean_jaccard,
            mean_consistency: r.mean_consistency,
        });
        eprintln!(
            "k = {k}: mean Jaccard {:.4}, mean consistency {:.4}",
            r.mean_jaccard, r.mean_consistency
        );
    }
    out.write_csv("stability_curve.csv", &cfg, |w| report::write_curve_csv(&curve, w))?;
    Ok(())
}

/// Deterministic train/holdout split of the rows.
fn holdout_split(ds: &SurvivalDataset, fraction: f64, seed: u64) -> Result<(SurvivalDataset, SurvivalDataset)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(CoxError::contract(format!(
            "holdout fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let n = ds.n();
    let n_test = ((n as f64) * fraction).round() as usize;
    if n_test == 0 || n_test == n {
        return Err(CoxError::contract(format!(
            "holdout fraction {fraction} leaves an empty split of {n} rows"
        )));
    }
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (test, train) = rows.split_at(n_test);
    let (mut test, mut train) = (test.to_vec(), train.to_vec());
    test.sort_unstable();
    train.sort_unstable();
    Ok((ds.resample(&train)?, ds.resample(&test)?))
}

#[derive(Serialize)]
struct GridResult<'a> {
    k: usize,
    rows: &'a [GridRow],
}

pub fn grid(a: &GridArgs) -> Result<()> {
    let seed = seed_or_default(a.seed);
    let mut cfg = RunConfig::new("grid", &a.out_dir);
    a.data.record(&mut cfg);
    a.model.record(&mut cfg);
    cfg.alphas = Some(a.alphas.clone());
    cfg.betas = Some(a.betas.clone());
    cfg.eval_features = a.eval_features.as_deref().map(path_string);
    cfg.eval_meta = a.eval_meta.as_deref().map(path_string);
    cfg.holdout_fraction = a.holdout_fraction;
    cfg.horizon_days = Some(a.horizon_days);
    cfg.ci_resamples = Some(a.ci_resamples);
    cfg.bootstraps = Some(a.bootstraps);
    cfg.top_k = Some(vec![a.top_k]);
    cfg.seed = Some(seed);

    if a.alphas.is_empty() || a.betas.is_empty() {
        return Err(CoxError::contract("grid needs at least one alpha and one beta"));
    }
    let full = a.data.load()?;
    let (train_raw, test) = match (&a.eval_features, &a.eval_meta, a.holdout_fraction) {
        (Some(f), Some(m), None) => (full, load_dataset(f, m)?),
        (None, None, Some(frac)) => holdout_split(&full, frac, seed)?,
        _ => {
            return Err(CoxError::contract(
                "grid needs either --eval-features with --eval-meta, or --holdout-fraction",
            ))
        }
    };
    if test.p() != train_raw.p() {
        return Err(CoxError::contract(format!(
            "training data has {} features, evaluation data has {}",
            train_raw.p(),
            test.p()
        )));
    }
    check_k(&[a.top_k], train_raw.p())?;
    let (train, l) = prepare(&train_raw, &a.model)?;

    let cells: Vec<(f64, f64)> = a
        .alphas
        .iter()
        .flat_map(|&al| a.betas.iter().map(move |&be| (al, be)))
        .collect();
    let run_cell = |&(alpha, beta): &(f64, f64)| -> Result<GridRow> {
        let model = fit(&train, &l, alpha, beta, &a.model.fit_options())?;
        let ev: EvaluationReport =
            evaluation::evaluate(&model, &test, a.horizon_days, a.ci_resamples, seed)?;
        let run = bootstrap(&train_raw, &l, &a.model, alpha, beta, a.bootstraps, seed)?;
        let (_, r) = run.report(a.top_k)?;
        Ok(GridRow {
            alpha,
            beta,
            auc: ev.auc,
            nonzeros: model.nonzero_count(),
            mean_consistency: r.mean_consistency,
            mean_jaccard: r.mean_jaccard,
        })
    };
    let rows: Vec<GridRow> = {
        use rayon::prelude::*;
        cells.par_iter().map(run_cell).collect::<Result<_>>()?
    };

    let out = OutDir::create(&a.out_dir)?;
    out.write_csv("grid.csv", &cfg, |w| report::write_grid_csv(&rows, w))?;
    out.write_json("grid.json", &cfg, GridResult { k: a.top_k, rows: &rows })?;
    eprintln!("grid: {} cells written", rows.len());
    Ok(())
}

impl SynthArgs {
    fn config(&self) -> SynthConfig {
        let base = SynthConfig::shipped();
        SynthConfig {
            n: self.n.unwrap_or(base.n),
            n_groups: self.n_groups.unwrap_or(base.n_groups),
            group_size: self.group_size.unwrap_or(base.group_size),
            within_corr: self.within_corr.unwrap_or(base.within_corr),
            n_noise: self.n_noise.unwrap_or(base.n_noise),
            true_weights: self
                .group_weights
                .clone()
                .map(WeightSpec::PerGroup)
                .unwrap_or(base.true_weights),
            baseline_rate: self.baseline_rate.unwrap_or(base.baseline_rate),
            censor_rate: self.censor_rate.unwrap_or(base.censor_rate),
            seed: self.seed.unwrap_or(base.seed),
        }
    }
}

pub fn synth(a: &SynthArgs) -> Result<()> {
    let synth_cfg = a.config();
    let mut cfg = RunConfig::new("synth", &a.out_dir);
    cfg.seed = Some(synth_cfg.seed);
    cfg.synth = Some(synth_cfg.clone());

    let (ds, truth) = generate(&synth_cfg)?;
    let out = OutDir::create(&a.out_dir)?;
    let (mut features, mut meta) = (Vec::new(), Vec::new());
    write_provenance(&mut features, &cfg).and_then(|_| write_provenance(&mut meta, &cfg))
        .and_then(|_| coxstab::data::write_dataset_to(&ds, &mut features, &mut meta))
        .map_err(|e| CoxError::io(out.path("features.csv"), e))?;
    write_file(out.path("features.csv"), &features)?;
    write_file(out.path("meta.csv"), &meta)?;
    out.write_json("truth.json", &cfg, &truth)?;
    eprintln!(
        "synth: n = {}, p = {}, censored {:.1}%, code prefix length {}",
        ds.n(),
        ds.p(),
        100.0 * truth.censored_fraction,
        truth.code_prefix_len
    );
    Ok(())
}

fn write_file(path: PathBuf, bytes: &[u8]) -> Result<()> {
    fs::write(&path, bytes).map_err(|e| CoxError::io(&path, e))
}

#[derive(Serialize, Deserialize)]
struct GraphSummary {
    p: usize,
    edges: usize,
    code_edges: usize,
    temporal_edges: usize,
    code_and_temporal_edges: usize,
    components: usize,
}

pub fn graph_export(a: &GraphExportArgs) -> Result<()> {
    let mut cfg = RunConfig::new("graph-export", &a.out_dir);
    a.data.record(&mut cfg);
    cfg.prefix_len = Some(a.prefix_len);

    let ds = a.data.load()?;
    let g = build_graph(ds.meta(), a.prefix_len)?;
    let count = |t: coxstab::EdgeTag| g.edges().filter(|e| e.2 == t).count();
    let mut labels = g.components();
    labels.sort_unstable();
    labels.dedup();
    let summary = GraphSummary {
        p: g.p(),
        edges: g.edge_count(),
        code_edges: count(coxstab::EdgeTag::Code),
        temporal_edges: count(coxstab::EdgeTag::Temporal),
        code_and_temporal_edges: count(coxstab::EdgeTag::CodeAndTemporal),
        components: labels.len(),
    };
    let out = OutDir::create(&a.out_dir)?;
    out.write_csv("edges.csv", &cfg, |w| g.write_edge_list(w))?;
    out.write_json("graph.json", &cfg, &summary)?;
    eprintln!("graph: {} features, {} edges", summary.p, summary.edges);
    Ok(())
}

pub fn dispatch(cmd: &crate::args::Command) -> Result<()> {
    use crate::args::Command::*;
    match cmd {
        Train(a) => train(a),
        Evaluate(a) => evaluate(a),
        Stability(a) => stability(a),
        Grid(a) => grid(a),
        Synth(a) => synth(a),
        GraphExport(a) => graph_export(a),
    }
}
