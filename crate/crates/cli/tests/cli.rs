//! End-to-end runs of the `ednet` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ednet::simulate::{generate, low_d_model};
use ednet::{rng, Architecture, Network};
use nalgebra::{DMatrix, DVector};
use serde_json::Value;
use tempfile::TempDir;

fn ednet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ednet")).args(args).current_dir(dir).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Data rows of a CSV, skipping provenance comments.
fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "sim.json", r#"{"model": {"kind": "low_d"}, "n": 1000}"#);
    for out in ["a", "b"] {
        let o = ednet(&["simulate", "--config", "sim.json", "--seed", "9", "--out", out], tmp.path());
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    for file in ["series.csv", "series.json"] {
        assert_eq!(fs::read(tmp.path().join("a").join(file)).unwrap(), fs::read(tmp.path().join("b").join(file)).unwrap());
    }
    let csv = fs::read_to_string(tmp.path().join("a/series.csv")).unwrap();
    assert!(csv.starts_with("# ednet "));
    assert!(csv.contains("# config_sha256 ") && csv.contains("# seed 9"));
    let data = rows(&tmp.path().join("a/series.csv"));
    assert_eq!(data.len(), 1001);
    assert_eq!(data[0], ["t", "x1", "x2", "x3", "x4", "x5"]);
    let sidecar = json(&tmp.path().join("a/series.json"));
    assert_eq!(sidecar["burn_in"], 1000);
    assert_eq!(sidecar["provenance"]["seed"], 9);

    // the library path gives the same numbers
    let lib = generate(&low_d_model(9), 1000, 1000).unwrap();
    assert_eq!(data[1][1].parse::<f64>().unwrap(), lib.row(0)[0]);
    assert_eq!(data[1000][5].parse::<f64>().unwrap(), lib.row(999)[4]);
}

#[test]
fn different_seeds_change_hash_and_data() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "sim.json", r#"{"model": {"kind": "ar1", "a": 0.5, "noise_sd": 1.0}, "n": 50}"#);
    ednet(&["simulate", "--config", "sim.json", "--seed", "1", "--out", "a"], tmp.path());
    ednet(&["simulate", "--config", "sim.json", "--seed", "2", "--out", "b"], tmp.path());
    let (a, b) = (json(&tmp.path().join("a/series.json")), json(&tmp.path().join("b/series.json")));
    assert_ne!(a["provenance"]["config_sha256"], b["provenance"]["config_sha256"]);
    assert_ne!(rows(&tmp.path().join("a/series.csv")), rows(&tmp.path().join("b/series.csv")));
}

#[test]
fn config_errors_exit_two_with_field_path() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "short.json", r#"{"model": {"kind": "zero", "d": 2, "r": 3, "noise_sd": 1.0}, "n": 3}"#);
    let o = ednet(&["simulate", "--config", "short.json"], tmp.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("r + 1"), "{}", stderr(&o));

    write(tmp.path(), "nested.json", r#"{"preset": "low_d", "train": {"epochs": 1, "lr_schedule": [[0, 0.1]], "momentum": 0.9}}"#);
    let o = ednet(&["train", "--config", "nested.json"], tmp.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("`train.momentum`"), "{}", stderr(&o));

    write(tmp.path(), "model.json", r#"{"model": {"kind": "ar1", "a": 0.5, "noise_sd": 1.0, "b": 2}, "n": 10}"#);
    let o = ednet(&["simulate", "--config", "model.json"], tmp.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("b"), "{}", stderr(&o));

    let o = ednet(&["rates"], tmp.path());
    assert_eq!(code(&o), 2);
    let o = ednet(&["rates", "--config", "missing.json"], tmp.path());
    assert_eq!(code(&o), 2);
    let o = ednet(&["frobnicate"], tmp.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn preset_training_matches_library_and_reruns_identically() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "train.json", r#"{"preset": "low_d"}"#);
    for out in ["a", "b"] {
        let o = ednet(&["train", "--config", "train.json", "--seed", "2", "--out", out], tmp.path());
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    for file in ["model.json", "curve.csv", "train.json"] {
        assert_eq!(fs::read(tmp.path().join("a").join(file)).unwrap(), fs::read(tmp.path().join("b").join(file)).unwrap(), "{file}");
    }
    let summary = json(&tmp.path().join("a/train.json"));
    let lib = ednet::presets::low_d(2).run().unwrap();
    assert_eq!(summary["test_risk"].as_f64().unwrap(), lib.test_risk);
    assert!((0.2..=0.35).contains(&lib.test_risk));
    let curve = rows(&tmp.path().join("a/curve.csv"));
    assert_eq!(curve[0], ["epoch", "train_risk", "test_risk"]);
    assert_eq!(curve.len(), 62);
}

#[test]
fn zero_epochs_keeps_the_initial_network() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "train.json", r#"{"preset": "high_d"}"#);
    let o = ednet(&["train", "--config", "train.json", "--epochs", "0", "--seed", "4"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let model = json(&tmp.path().join("model.json"));
    let saved = Network::from_json(&model["network"].to_string()).unwrap();
    let arch = Architecture::new(vec![30, 60, 30, 2, 30, 60, 30]).unwrap().with_bottleneck(3).unwrap();
    let initial = Network::initial(arch, &mut rng::stream(4, rng::STREAM_INIT)).unwrap();
    assert_eq!(saved, initial);
}

fn write_series(dir: &Path, name: &str, seed: u64, n: usize) -> PathBuf {
    let series = generate(&low_d_model(seed), n, 1000).unwrap();
    let p = dir.join(name);
    series.write_csv(fs::File::create(&p).unwrap(), &[]).unwrap();
    p
}

#[test]
fn csv_sweep_emits_table() {
    let tmp = TempDir::new().unwrap();
    write_series(tmp.path(), "data.csv", 3, 300);
    write(
        tmp.path(),
        "sweep.json",
        r#"{"data": "data.csv", "n_train": 200,
            "train": {"epochs": 3, "lr_schedule": [[0, 0.01]], "batch_size": 4},
            "sweep": {"rs": [1, 2], "ms": [2, 3], "hidden": 6}}"#,
    );
    let o = ednet(&["train", "--config", "sweep.json", "--out", "s"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = rows(&tmp.path().join("s/sweep.csv"));
    assert_eq!(table[0], ["r", "m2", "m3"]);
    assert_eq!(table.len(), 3);
    assert_eq!(table[2][0], "2");
    let cells = json(&tmp.path().join("s/sweep.json"));
    assert_eq!(cells["cells"].as_array().unwrap().len(), 4);
    let first = fs::read(tmp.path().join("s/sweep.csv")).unwrap();
    ednet(&["train", "--config", "sweep.json", "--out", "s"], tmp.path());
    assert_eq!(first, fs::read(tmp.path().join("s/sweep.csv")).unwrap());
}

#[test]
fn architecture_must_match_data() {
    let tmp = TempDir::new().unwrap();
    write_series(tmp.path(), "data.csv", 3, 100);
    write(
        tmp.path(),
        "train.json",
        r#"{"data": "data.csv", "r": 2, "architecture": {"widths": [5, 8, 5]},
            "train": {"epochs": 1, "lr_schedule": [[0, 0.01]]}}"#,
    );
    let o = ednet(&["train", "--config", "train.json"], tmp.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("architecture"), "{}", stderr(&o));
}

#[test]
fn divergence_exits_three() {
    let tmp = TempDir::new().unwrap();
    write_series(tmp.path(), "data.csv", 3, 200);
    write(
        tmp.path(),
        "train.json",
        r#"{"data": "data.csv", "architecture": {"widths": [5, 8, 5]},
            "train": {"epochs": 20, "lr_schedule": [[0, 50.0]], "batch_size": 1}}"#,
    );
    let o = ednet(&["train", "--config", "train.json"], tmp.path());
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("diverged"), "{}", stderr(&o));
}

/// Model file holding the exact low-dimensional map `v a x` as a ReLU network.
fn truth_model(dir: &Path) -> PathBuf {
    let model = low_d_model(0);
    let (v, a) = match &model.f0 {
        ednet::simulate::EvolutionMap::LinearRankReduced { v, a } => (v.clone(), a.clone()),
        _ => unreachable!(),
    };
    let w0 = DMatrix::from_fn(2, 5, |i, j| if i == 0 { a[(0, j)] } else { -a[(0, j)] });
    let w1 = DMatrix::from_fn(5, 2, |i, j| if j == 0 { v[(i, 0)] } else { -v[(i, 0)] });
    let net = Network::new(Architecture::new(vec![5, 2, 5]).unwrap(), vec![w0, w1], vec![DVector::zeros(2)]).unwrap();
    let doc = serde_json::json!({
        "provenance": {},
        "r": 1,
        "scaler": null,
        "network": serde_json::from_str::<Value>(&net.to_json().unwrap()).unwrap(),
    });
    write(dir, "truth.json", &doc.to_string())
}

#[test]
fn evaluate_truth_reaches_noise_floor() {
    let tmp = TempDir::new().unwrap();
    truth_model(tmp.path());
    write_series(tmp.path(), "data.csv", 8, 4000);
    write(tmp.path(), "eval.json", r#"{"model": "truth.json", "data": "data.csv", "start": 1000, "k": 7}"#);
    let o = ednet(&["evaluate", "--config", "eval.json", "--out", "e"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let m = json(&tmp.path().join("e/metrics.json"));
    let risk = m["risk"].as_f64().unwrap();
    assert!((risk - 0.25).abs() < 0.02, "{risk}");
    assert!(m["naive_risk"].as_f64().unwrap() > risk);
    let steps = m["forecast_errors"].as_array().unwrap();
    assert_eq!(steps.len(), 7);
    assert!((steps[0].as_f64().unwrap() - risk).abs() < 0.01);

    write(tmp.path(), "lag.json", r#"{"model": "truth.json", "data": "data.csv", "r": 2}"#);
    let o = ednet(&["evaluate", "--config", "lag.json"], tmp.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("r = 2"), "{}", stderr(&o));

    write(tmp.path(), "wide.csv", "t,x1,x2\n1,0.1,0.2\n2,0.3,0.4\n3,0.5,0.6\n");
    write(tmp.path(), "dim.json", r#"{"model": "truth.json", "data": "wide.csv"}"#);
    let o = ednet(&["evaluate", "--config", "dim.json"], tmp.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("lag mismatch"), "{}", stderr(&o));
}

#[test]
fn certify_outputs() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "zero.json", r#"{"function": "zero", "m": 8}"#);
    let o = ednet(&["certify", "--config", "zero.json", "--out", "z"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let c = json(&tmp.path().join("z/certificate.json"));
    // zero up to rounding in the final affine rescaling
    assert!(c["certificate"]["measured_sup"].as_f64().unwrap() <= 1e-12);
    assert_eq!(c["holds"], true);

    write(tmp.path(), "p.json", r#"{"function": "product2", "N": 45, "m": 8}"#);
    let o = ednet(&["certify", "--config", "p.json", "--out", "p"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let c = json(&tmp.path().join("p/certificate.json"));
    assert!(c["certificate"]["measured_sup"].as_f64().unwrap() <= c["certificate"]["sup_bound"].as_f64().unwrap());

    write(tmp.path(), "small.json", r#"{"function": "product2", "N": 44, "m": 8}"#);
    let o = ednet(&["certify", "--config", "small.json"], tmp.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("(beta+1)^t ∨ (K+1)e^t"), "{}", stderr(&o));

    write(tmp.path(), "unknown.json", r#"{"function": "cosh", "m": 8}"#);
    assert_eq!(code(&ednet(&["certify", "--config", "unknown.json"], tmp.path())), 2);
}

#[test]
fn rates_tables() {
    let tmp = TempDir::new().unwrap();
    write(
        tmp.path(),
        "ind.json",
        r#"{"dependence": {"kind": "independent"}, "profile": {"stages": [[1, 1]]}, "alpha": 2, "ns": [10000]}"#,
    );
    let o = ednet(&["rates", "--config", "ind.json", "--out", "i"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let lambda = rows(&tmp.path().join("i/lambda.csv"));
    assert_eq!(lambda[0], ["x", "lambda", "envelope"]);
    for row in &lambda[1..] {
        assert_eq!(row[0], row[1]);
    }
    let rates = rows(&tmp.path().join("i/rates.csv"));
    assert_eq!(rates[0], ["n", "N", "predicted_rate", "bound"]);
    assert_eq!(rates[1][1], "10");

    write(
        tmp.path(),
        "poly.json",
        r#"{"dependence": {"kind": "mixing_polynomial", "alpha": 2, "kappa": 1}, "profile": {"stages": [[2, 1]]}}"#,
    );
    let o = ednet(&["rates", "--config", "poly.json", "--out", "p"], tmp.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for row in &rows(&tmp.path().join("p/lambda.csv"))[1..] {
        let (l, e): (f64, f64) = (row[1].parse().unwrap(), row[2].parse().unwrap());
        assert!(e >= l, "{row:?}");
    }

    write(tmp.path(), "noalpha.json", r#"{"dependence": {"kind": "independent"}, "profile": {"stages": [[1, 1]]}}"#);
    assert_eq!(code(&ednet(&["rates", "--config", "noalpha.json"], tmp.path())), 2);
}

#[test]
fn fetch_note_prints_source() {
    let tmp = TempDir::new().unwrap();
    let o = ednet(&["train", "--fetch-note"], tmp.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("https://opendata.dwd.de/"));
}
