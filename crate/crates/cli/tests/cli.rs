use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_coxstab"));
    c.env_remove("COXSTAB_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn without_timestamp(p: &Path) -> Value {
    let mut v = read_json(p);
    assert!(v["generated_at"].is_u64(), "{} has no timestamp", p.display());
    v.as_object_mut().unwrap().remove("generated_at");
    v
}

/// CSV data rows, skipping provenance comments and the header.
fn csv_rows(p: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

struct Synth {
    _dir: TempDir,
    features: PathBuf,
    meta: PathBuf,
}

fn synth(extra: &[&str]) -> Synth {
    let dir = TempDir::new().unwrap();
    let mut args = vec!["synth", "--out-dir", s(dir.path())];
    args.extend_from_slice(extra);
    ok(&args);
    Synth {
        features: dir.path().join("features.csv"),
        meta: dir.path().join("meta.csv"),
        _dir: dir,
    }
}

#[test]
fn missing_meta_exits_2_naming_the_path() {
    let data = synth(&["--n", "40", "--n-noise", "4"]);
    let out_dir = TempDir::new().unwrap();
    let missing = out_dir.path().join("no_such_meta.csv");
    let out = run(&[
        "train",
        "--features",
        s(&data.features),
        "--meta",
        s(&missing),
        "--out-dir",
        s(out_dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_meta.csv"));
}

#[test]
fn contract_violations_exit_4() {
    let data = synth(&["--n", "40", "--n-noise", "4"]);
    let out_dir = TempDir::new().unwrap();
    let base = ["--features", s(&data.features), "--meta", s(&data.meta), "--out-dir", s(out_dir.path())];
    let mut args = vec!["train", "--alpha", "-1"];
    args.extend_from_slice(&base);
    assert_eq!(run(&args).status.code(), Some(4));

    // k must be below p = 34
    let mut args = vec!["stability", "--top-k", "34", "--bootstraps", "2"];
    args.extend_from_slice(&base);
    assert_eq!(run(&args).status.code(), Some(4));

    // grid without evaluation data
    let mut args = vec!["grid", "--alphas", "0.1", "--betas", "0"];
    args.extend_from_slice(&base);
    assert_eq!(run(&args).status.code(), Some(4));
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("f.csv");
    let m = dir.path().join("m.csv");
    fs::write(&f, "time,event,a\n1,1,0.5\nx,0,1\n").unwrap();
    fs::write(&m, "name,code,window_id,event_key\na,I50,1,I50\n").unwrap();
    let out = run(&["train", "--features", s(&f), "--meta", s(&m), "--out-dir", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn operating_point_is_echoed() {
    let data = synth(&[]);
    let out = TempDir::new().unwrap();
    ok(&[
        "train",
        "--features",
        s(&data.features),
        "--meta",
        s(&data.meta),
        "--alpha",
        "0.004",
        "--beta",
        "0.03",
        "--out-dir",
        s(out.path()),
    ]);
    let report = read_json(&out.path().join("fit_report.json"));
    assert_eq!(report["config"]["alpha"], 0.004);
    assert_eq!(report["config"]["beta"], 0.03);
    assert_eq!(report["result"]["alpha"], 0.004);
    assert_eq!(report["result"]["beta"], 0.03);
    assert_eq!(report["tool"], "coxstab");
    assert!(report["version"].is_string());
    let top = report["result"]["top_features"].as_array().unwrap();
    assert_eq!(top.len(), 20);
    assert_eq!(top[0]["importance"], 100.0);
    let model = read_json(&out.path().join("model.json"));
    assert_eq!(model["result"]["weights"].as_array().unwrap().len(), 60);
}

#[test]
fn large_alpha_selects_nothing() {
    let data = synth(&["--n", "100"]);
    let out = TempDir::new().unwrap();
    ok(&[
        "train",
        "--features",
        s(&data.features),
        "--meta",
        s(&data.meta),
        "--alpha",
        "10",
        "--out-dir",
        s(out.path()),
    ]);
    let report = read_json(&out.path().join("fit_report.json"));
    assert_eq!(report["result"]["nonzero"], 0);
    assert!(report["result"]["top_features"].as_array().unwrap().is_empty());
}

#[test]
fn reports_are_reproducible_and_carry_provenance() {
    let data = synth(&["--n", "150"]);
    let out = TempDir::new().unwrap();
    let args = [
        "stability",
        "--features",
        s(&data.features),
        "--meta",
        s(&data.meta),
        "--alpha",
        "0.02",
        "--bootstraps",
        "8",
        "--top-k",
        "5,10",
        "--out-dir",
        s(out.path()),
    ];
    ok(&args);
    let first: Vec<Value> = ["stability_k5.json", "stability_k10.json"]
        .iter()
        .map(|f| without_timestamp(&out.path().join(f)))
        .collect();
    let curve = fs::read(out.path().join("stability_curve.csv")).unwrap();
    ok(&args);
    let second: Vec<Value> = ["stability_k5.json", "stability_k10.json"]
        .iter()
        .map(|f| without_timestamp(&out.path().join(f)))
        .collect();
    assert_eq!(first, second);
    assert_eq!(curve, fs::read(out.path().join("stability_curve.csv")).unwrap());

    // same result on a single thread
    let mut single = vec!["--jobs", "1"];
    single.extend_from_slice(&args);
    ok(&single);
    assert_eq!(first[0], without_timestamp(&out.path().join("stability_k5.json")));

    let text = String::from_utf8(curve).unwrap();
    assert!(text.starts_with("# coxstab "));
    assert!(text.lines().nth(1).unwrap().contains("\"bootstraps\":8"));
    assert_eq!(first[0]["config"]["seed"], 2014);
    assert_eq!(first[0]["result"]["report"]["B"], 8);
}

#[test]
fn seed_flag_overrides_environment() {
    let data = synth(&["--n", "60", "--n-noise", "4"]);
    let out = TempDir::new().unwrap();
    let args = [
        "stability",
        "--features",
        s(&data.features),
        "--meta",
        s(&data.meta),
        "--bootstraps",
        "2",
        "--top-k",
        "3",
        "--out-dir",
        s(out.path()),
    ];
    let status = bin().args(args).env("COXSTAB_SEED", "77").output().unwrap().status;
    assert!(status.success());
    assert_eq!(read_json(&out.path().join("stability_k3.json"))["config"]["seed"], 77);
    let mut with_flag = args.to_vec();
    with_flag.extend_from_slice(&["--seed", "5"]);
    let status = bin().args(&with_flag).env("COXSTAB_SEED", "77").output().unwrap().status;
    assert!(status.success());
    assert_eq!(read_json(&out.path().join("stability_k3.json"))["config"]["seed"], 5);
}

#[test]
fn k_list_gives_one_curve_row_per_k() {
    let data = synth(&["--n", "120", "--n-noise", "70"]);
    let out = TempDir::new().unwrap();
    ok(&[
        "stability",
        "--features",
        s(&data.features),
        "--meta",
        s(&data.meta),
        "--alpha",
        "0.01",
        "--bootstraps",
        "3",
        "--top-k",
        "10,20,30,40,50,60,70,80,90",
        "--out-dir",
        s(out.path()),
    ]);
    let rows = csv_rows(&out.path().join("stability_curve.csv"));
    assert_eq!(rows.len(), 9);
    let ks: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(ks, ["10", "20", "30", "40", "50", "60", "70", "80", "90"]);
    for k in (10..=90).step_by(10) {
        assert!(out.path().join(format!("stability_k{k}.json")).exists());
    }
}

#[test]
fn identical_bootstrap_selections_have_unit_stability() {
    // one feature drives the event order; the other is noise
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("f.csv");
    let m = dir.path().join("m.csv");
    let mut text = String::from("time,event,signal,noise\n");
    for i in 0..40 {
        let x = i as f64 / 10.0 - 2.0;
        let noise = ((i * 7919) % 13) as f64 / 13.0 - 0.5;
        text.push_str(&format!("{},1,{x},{noise}\n", (-2.0 * x).exp() * 100.0));
    }
    fs::write(&f, text).unwrap();
    fs::write(&m, "name,code,window_id,event_key\nsignal,A00,1,a\nnoise,B00,1,b\n").unwrap();
    ok(&[
        "stability",
        "--features",
        s(&f),
        "--meta",
        s(&m),
        "--alpha",
        "0.01",
        "--beta",
        "0",
        "--bootstraps",
        "2",
        "--top-k",
        "1",
        "--out-dir",
        s(dir.path()),
    ]);
    let r = read_json(&dir.path().join("stability_k1.json"));
    assert_eq!(r["result"]["report"]["mean_jaccard"], 1.0);
    assert_eq!(r["result"]["report"]["mean_consistency"], 1.0);
}

#[test]
fn single_cell_grid_matches_separate_runs() {
    let train = synth(&["--n", "200"]);
    let test = synth(&["--n", "200", "--seed", "11"]);
    let out = TempDir::new().unwrap();
    let p = |name: &str| out.path().join(name);
    let (train_dir, eval_dir, stab_dir, grid_dir) = (p("train"), p("eval"), p("stab"), p("grid"));
    let data = ["--features", s(&train.features), "--meta", s(&train.meta)];
    let pen = ["--alpha", "0.02", "--beta", "0.5"];

    let mut args = vec!["train", "--out-dir", s(&train_dir)];
    args.extend_from_slice(&data);
    args.extend_from_slice(&pen);
    ok(&args);
    let model = train_dir.join("model.json");
    ok(&[
        "evaluate",
        "--model",
        s(&model),
        "--features",
        s(&test.features),
        "--meta",
        s(&test.meta),
        "--out-dir",
        s(&eval_dir),
    ]);
    let mut args = vec!["stability", "--bootstraps", "10", "--top-k", "10", "--out-dir", s(&stab_dir)];
    args.extend_from_slice(&data);
    args.extend_from_slice(&pen);
    ok(&args);
    let mut args = vec![
        "grid",
        "--alphas",
        "0.02",
        "--betas",
        "0.5",
        "--bootstraps",
        "10",
        "--top-k",
        "10",
        "--eval-features",
        s(&test.features),
        "--eval-meta",
        s(&test.meta),
        "--out-dir",
        s(&grid_dir),
    ];
    args.extend_from_slice(&data);
    ok(&args);

    let fit = read_json(&train_dir.join("fit_report.json"));
    let ev = read_json(&eval_dir.join("evaluation.json"));
    let st = read_json(&stab_dir.join("stability_k10.json"));
    let grid = read_json(&grid_dir.join("grid.json"));
    let row = &grid["result"]["rows"][0];
    assert_eq!(grid["result"]["rows"].as_array().unwrap().len(), 1);
    assert_eq!(row["auc"], ev["result"]["auc"]);
    assert_eq!(row["nonzeros"], fit["result"]["nonzero"]);
    assert_eq!(row["mean_consistency"], st["result"]["report"]["mean_consistency"]);
    assert_eq!(row["mean_jaccard"], st["result"]["report"]["mean_jaccard"]);
    assert_eq!(csv_rows(&grid_dir.join("grid.csv")).len(), 1);
}

#[test]
fn grid_is_alpha_major_and_follows_expected_directions() {
    let data = synth(&[]);
    let out = TempDir::new().unwrap();
    ok(&[
        "grid",
        "--features",
        s(&data.features),
        "--meta",
        s(&data.meta),
        "--alphas",
        "0.005,0.02,0.08",
        "--betas",
        "0,0.1,1",
        "--bootstraps",
        "20",
        "--top-k",
        "10",
        "--holdout-fraction",
        "0.3",
        "--out-dir",
        s(out.path()),
    ]);
    let rows = csv_rows(&out.path().join("grid.csv"));
    assert_eq!(rows.len(), 9);
    let num = |r: &Vec<String>, i: usize| r[i].parse::<f64>().unwrap();
    for (idx, r) in rows.iter().enumerate() {
        assert_eq!(num(r, 0), [0.005, 0.02, 0.08][idx / 3]);
        assert_eq!(num(r, 1), [0.0, 0.1, 1.0][idx % 3]);
    }
    // consistency non-decreasing in beta at each alpha
    for a in 0..3 {
        let c: Vec<f64> = (0..3).map(|b| num(&rows[3 * a + b], 4)).collect();
        assert!(c.windows(2).all(|w| w[1] >= w[0]), "alpha row {a}: {c:?}");
    }
    // nonzeros non-increasing in alpha at each beta
    for b in 0..3 {
        let nz: Vec<f64> = (0..3).map(|a| num(&rows[3 * a + b], 3)).collect();
        assert!(nz.windows(2).all(|w| w[1] <= w[0]), "beta column {b}: {nz:?}");
    }
}

#[test]
fn graph_penalty_dominates_at_every_k() {
    let data = synth(&[]);
    let out = TempDir::new().unwrap();
    let curve = |beta: &str| {
        let dir = out.path().join(format!("b{beta}"));
        ok(&[
            "stability",
            "--features",
            s(&data.features),
            "--meta",
            s(&data.meta),
            "--alpha",
            "0.02",
            "--beta",
            beta,
            "--bootstraps",
            "20",
            "--top-k",
            "5,10,15",
            "--out-dir",
            s(&dir),
        ]);
        csv_rows(&dir.join("stability_curve.csv"))
    };
    let base = curve("0");
    let graph = curve("0.5");
    for (b, g) in base.iter().zip(&graph) {
        let f = |r: &Vec<String>, i: usize| r[i].parse::<f64>().unwrap();
        assert!(f(g, 1) > f(b, 1) && f(g, 2) > f(b, 2), "{b:?} vs {g:?}");
    }
}

#[test]
fn synth_and_graph_export_outputs() {
    let dir = TempDir::new().unwrap();
    ok(&["synth", "--n", "50", "--n-groups", "3", "--group-size", "2", "--n-noise", "2", "--group-weights", "1,-1,0", "--out-dir", s(dir.path())]);
    let truth = read_json(&dir.path().join("truth.json"));
    assert_eq!(truth["result"]["code_prefix_len"], 2);
    assert_eq!(truth["config"]["synth"]["true_weights"]["per_group"][1], -1.0);
    let features = fs::read_to_string(dir.path().join("features.csv")).unwrap();
    assert!(features.starts_with("# coxstab "));

    ok(&[
        "graph-export",
        "--features",
        s(&dir.path().join("features.csv")),
        "--meta",
        s(&dir.path().join("meta.csv")),
        "--prefix-len",
        "2",
        "--out-dir",
        s(dir.path()),
    ]);
    let edges = csv_rows(&dir.path().join("edges.csv"));
    assert_eq!(edges, vec![
        vec!["0", "1", "code+temporal"],
        vec!["2", "3", "code+temporal"],
        vec!["4", "5", "code+temporal"],
    ]);
    let summary = read_json(&dir.path().join("graph.json"));
    assert_eq!(summary["result"]["components"], 5);
}
