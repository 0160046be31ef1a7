use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hqnn_core::nn::{Mlp, MlpCheckpoint};
use hqnn_core::rng;
use serde_json::{json, Value};
use tempfile::TempDir;

fn hqnn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hqnn"))
        .args(args)
        .env("RUST_LOG", "info")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = hqnn(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_schema(name: &str, value: &Value) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("schemas/{name}.schema.json"));
    let validator = jsonschema::validator_for(&read_json(&path)).unwrap();
    let errors: Vec<String> = validator.iter_errors(value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

const SMILES: [&str; 12] = [
    "CCN", "CCCN", "NCCO", "CN(C)C", "c1ccccc1N", "NC1CCCCC1", "C1CCNCC1", "OCCNCCO",
    "CC(C)N", "c1ccncc1", "NCc1ccccc1", "C1CCOC1N",
];

fn smiles_csv(dir: &Path) -> PathBuf {
    let mut text = String::from("id,smiles,y\n");
    for (i, s) in SMILES.iter().enumerate() {
        writeln!(text, "m{i},{s},{}", 0.3 * i as f64 + (s.len() as f64).sqrt()).unwrap();
    }
    let path = dir.join("mols.csv");
    std::fs::write(&path, text).unwrap();
    path
}

/// y = 2·f0 − f1 + 0.5·f2 + 1 over dense features, one scaffold per row.
fn linear_csv(dir: &Path, n: usize) -> PathBuf {
    let mut r = rng::substream(5, "linear");
    let mut text = String::from("y,scaffold,f0,f1,f2,f3\n");
    for i in 0..n {
        let f: Vec<f64> = (0..4).map(|_| rand::Rng::gen_range(&mut r, -1.0..1.0)).collect();
        let y = 2.0 * f[0] - f[1] + 0.5 * f[2] + 1.0;
        writeln!(text, "{y},{i},{},{},{},{}", f[0], f[1], f[2], f[3]).unwrap();
    }
    let path = dir.join("linear.csv");
    std::fs::write(&path, text).unwrap();
    path
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn featurize_writes_one_row_per_molecule_deterministically() {
    let tmp = TempDir::new().unwrap();
    let data = smiles_csv(tmp.path());
    let (a, b) = (tmp.path().join("a.csv"), tmp.path().join("b.csv"));
    for out in [&a, &b] {
        ok(&["featurize", "--data", p(&data), "--out", p(out), "--nbits", "64", "--radius", "2"]);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("id,smiles,y,scaffold,f0,"));
    assert_eq!(header.split(',').count(), 4 + 64);
    assert_eq!(lines.count(), SMILES.len());
}

#[test]
fn featurize_strict_cites_bad_row() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("bad.csv");
    std::fs::write(&data, "smiles,y\nCCN,1\nCCO,2\nC1CC(,3\n").unwrap();
    let out_csv = tmp.path().join("out.csv");
    let out = hqnn(&["featurize", "--data", p(&data), "--out", p(&out_csv), "--strict"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row 4") && err.contains("byte"), "{err}");

    ok(&["featurize", "--data", p(&data), "--out", p(&out_csv)]);
    assert_eq!(std::fs::read_to_string(&out_csv).unwrap().lines().count(), 3);
}

#[test]
fn pretrain_fits_linear_data_and_outputs_match_schemas() {
    let tmp = TempDir::new().unwrap();
    let data = linear_csv(tmp.path(), 120);
    let out = tmp.path().join("pre");
    ok(&[
        "pretrain", "--data", p(&data), "--out", p(&out), "--hidden", "32,16", "--dropout", "0",
        "--epochs", "300", "--batch-size", "16", "--lr", "0.003", "--folds", "3", "--seed", "1",
    ]);
    let metrics = read_json(&out.join("metrics.json"));
    assert_schema("metrics", &metrics);
    assert_schema("split", &read_json(&out.join("split.json")));
    for fold in 0..3 {
        assert_schema("mlp_checkpoint", &read_json(&out.join(format!("backbone_fold{fold}.json"))));
        let r2 = metrics["report"]["per_fold"][fold]["train_r2"].as_f64().unwrap();
        assert!(r2 >= 0.99, "fold {fold}: train R2 {r2}");
    }
}

#[test]
fn pretrain_zero_epochs_saves_initial_weights() {
    let tmp = TempDir::new().unwrap();
    let data = linear_csv(tmp.path(), 30);
    let out = tmp.path().join("pre");
    ok(&["pretrain", "--data", p(&data), "--out", p(&out), "--hidden", "8", "--epochs", "0", "--folds", "2", "--seed", "11"]);
    for fold in 0..2 {
        let saved = MlpCheckpoint::load(out.join(format!("backbone_fold{fold}.json"))).unwrap();
        let seed = rng::substream_seed(11, &format!("fold{fold}"));
        let fresh = Mlp::new(4, &[8], 1, 0.1, &mut rng::substream(seed, rng::INIT)).unwrap();
        assert_eq!(saved.model, fresh);
    }
}

#[test]
fn same_seed_gives_identical_bytes() {
    let tmp = TempDir::new().unwrap();
    let data = smiles_csv(tmp.path());
    let runs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let out = tmp.path().join(name);
            ok(&[
                "pretrain", "--data", p(&data), "--out", p(&out), "--hidden", "16", "--epochs", "5",
                "--nbits", "128", "--folds", "3", "--seed", "9",
            ]);
            let hq = tmp.path().join(format!("{name}-hq"));
            ok(&[
                "train-hqnn", "--data", p(&data), "--out", p(&hq), "--backbone", p(&out), "--strategy",
                "finetune", "--hidden", "16", "--epochs", "2", "--nbits", "128", "--folds", "3",
                "--seed", "9",
            ]);
            (dir_bytes(&out), dir_bytes(&hq))
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn frozen_training_leaves_backbone_hash_unchanged() {
    let tmp = TempDir::new().unwrap();
    let data = smiles_csv(tmp.path());
    let pre = tmp.path().join("pre");
    let common = ["--data", p(&data), "--hidden", "16", "--nbits", "128", "--folds", "2"];
    ok(&[&["pretrain", "--out", p(&pre), "--epochs", "5"], &common[..]].concat());
    let hq = tmp.path().join("hq");
    let out = ok(&[
        &["train-hqnn", "--out", p(&hq), "--backbone", p(&pre), "--strategy", "frozen", "--epochs", "3"],
        &common[..],
    ]
    .concat());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unchanged: true"));
    let metrics = read_json(&hq.join("metrics.json"));
    assert_schema("metrics", &metrics);
    assert_eq!(metrics["strategy"], "frozen");
    for f in metrics["folds"].as_array().unwrap() {
        assert_eq!(f["backbone_hash_before"], f["backbone_hash_after"]);
        assert_schema("hybrid_checkpoint", &read_json(&hq.join(f["checkpoint"].as_str().unwrap())));
    }
}

#[test]
fn nine_qubits_depth_two_has_eighteen_parameters() {
    let tmp = TempDir::new().unwrap();
    let data = smiles_csv(tmp.path());
    let hq = tmp.path().join("hq");
    let out = ok(&[
        "train-hqnn", "--data", p(&data), "--out", p(&hq), "--qubits", "9", "--depth", "2",
        "--hidden", "16", "--epochs", "1", "--nbits", "64", "--folds", "2",
    ]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("18 quantum parameters"));
    assert_eq!(read_json(&hq.join("metrics.json"))["quantum_params"], 18);
}

#[test]
fn zero_error_profile_matches_noiseless_run() {
    let tmp = TempDir::new().unwrap();
    let data = smiles_csv(tmp.path());
    let catalog = tmp.path().join("catalog.csv");
    std::fs::write(
        &catalog,
        "name,two_qubit_error,sx_error,readout_error,t1_seconds,t2_seconds,gate_time_seconds\n\
         IBM-Fez,0,0,0,1e300,1e300,6.8e-8\n",
    )
    .unwrap();
    let run = |name: &str, noise: &str| {
        let out = tmp.path().join(name);
        ok(&[
            "train-hqnn", "--data", p(&data), "--out", p(&out), "--hidden", "16", "--epochs", "3",
            "--nbits", "64", "--folds", "2", "--noise", noise, "--noise-catalog", p(&catalog),
        ]);
        read_json(&out.join("metrics.json"))
    };
    let (clean, noisy) = (run("clean", "none"), run("noisy", "IBM-Fez"));
    assert_eq!(noisy["noise"], "IBM-Fez");
    let folds = |v: &Value| v["report"]["per_fold"].as_array().unwrap().clone();
    for (a, b) in folds(&clean).iter().zip(folds(&noisy).iter()) {
        for key in ["train_r2", "train_mae", "test_r2", "test_mae"] {
            let (x, y) = (a[key].as_f64().unwrap(), b[key].as_f64().unwrap());
            assert!((x - y).abs() <= 1e-9, "{key}: {x} vs {y}");
        }
    }
}

#[test]
fn evaluate_reruns_checkpoints_under_noise() {
    let tmp = TempDir::new().unwrap();
    let data = smiles_csv(tmp.path());
    let hq = tmp.path().join("hq");
    let common = ["--data", p(&data), "--hidden", "16", "--nbits", "64", "--folds", "2"];
    ok(&[&["train-hqnn", "--out", p(&hq), "--epochs", "2"], &common[..]].concat());
    let clean = tmp.path().join("clean.json");
    ok(&[&["evaluate", "--checkpoints", p(&hq), "--out", p(&clean)], &common[..]].concat());
    let trained = read_json(&hq.join("metrics.json"));
    let evaluated = read_json(&clean);
    assert_schema("metrics", &evaluated);
    assert_eq!(trained["report"]["per_fold"], evaluated["report"]["per_fold"]);

    let noisy = tmp.path().join("noisy.json");
    ok(&[&["evaluate", "--checkpoints", p(&hq), "--out", p(&noisy), "--noise", "IBM-Torino"], &common[..]].concat());
    let noisy = read_json(&noisy);
    assert_eq!(noisy["report"]["label"], "HQSc (4Q) [IBM-Torino]");
    assert_ne!(noisy["report"]["per_fold"], evaluated["report"]["per_fold"]);
}

fn bare_report(dir: &Path, name: &str, label: &str, r2: f64, mae: f64, folds: usize) -> PathBuf {
    let m = json!({"train_r2": 0.0, "train_mae": 0.0, "test_r2": r2, "test_mae": mae});
    let z = json!({"train_r2": 0.0, "train_mae": 0.0, "test_r2": 0.0, "test_mae": 0.0});
    let report = json!({"label": label, "per_fold": vec![m.clone(); folds], "mean": m, "std": z});
    assert_schema("metrics_report", &report);
    let path = dir.join(name);
    std::fs::write(&path, report.to_string()).unwrap();
    path
}

#[test]
fn report_reproduces_basicity_row() {
    let tmp = TempDir::new().unwrap();
    let mlp = bare_report(tmp.path(), "mlp.json", "MLP", 0.9082, 0.3746, 0);
    let hqfi = bare_report(tmp.path(), "hqfi.json", "HQFi (4Q)", 0.9112, 0.3463, 0);
    let out = ok(&[
        "report", "--classical", p(&mlp), "--hqnn", p(&hqfi), "--property", "Basicity (pKa)", "--model",
        "HQMLP",
    ]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "property,model,HQFi (4Q) R2,HQFi (4Q) MAE\nBasicity (pKa),HQMLP,0.33,7.55\n"
    );
}

#[test]
fn report_of_identical_runs_is_zero() {
    let tmp = TempDir::new().unwrap();
    let a = bare_report(tmp.path(), "a.json", "HQSc (9Q)", 0.7, 0.2, 5);
    let csv = tmp.path().join("rel.csv");
    ok(&["report", "--classical", p(&a), "--hqnn", p(&a), "--out", p(&csv)]);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "property,MLP,0.00,0.00");
}

#[test]
fn report_rejects_mismatched_folds() {
    let tmp = TempDir::new().unwrap();
    let a = bare_report(tmp.path(), "a.json", "MLP", 0.7, 0.2, 5);
    let b = bare_report(tmp.path(), "b.json", "HQFr (4Q)", 0.7, 0.2, 3);
    let out = hqnn(&["report", "--classical", p(&a), "--hqnn", p(&b)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("folds"));
}

#[test]
fn noise_catalog_json_matches_schema() {
    let out = ok(&["noise-catalog", "--format", "json"]);
    let value: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_schema("noise_catalog", &value);
    assert_eq!(value[0]["name"], "IBM-Fez");
    let table = String::from_utf8(ok(&["noise-catalog"]).stdout).unwrap();
    assert!(table.lines().any(|l| l.starts_with("IBM-Torino")));
}

#[test]
fn config_errors_exit_with_code_two() {
    let tmp = TempDir::new().unwrap();
    let data = smiles_csv(tmp.path());
    let out = tmp.path().join("o");
    let unknown = hqnn(&["train-hqnn", "--data", p(&data), "--out", p(&out), "--noise", "IBM-Nowhere"]);
    assert_eq!(unknown.status.code(), Some(2));
    let no_backbone = hqnn(&["train-hqnn", "--data", p(&data), "--out", p(&out), "--strategy", "frozen"]);
    assert_eq!(no_backbone.status.code(), Some(2));
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "[model]\nqbits = 4\n").unwrap();
    assert_eq!(hqnn(&["pretrain", "--config", p(&cfg)]).status.code(), Some(2));
    let missing = hqnn(&["pretrain", "--data", "/nonexistent.csv", "--out", p(&out)]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let tmp = TempDir::new().unwrap();
    let data = smiles_csv(tmp.path());
    let out = tmp.path().join("o");
    let cfg = tmp.path().join("run.toml");
    std::fs::write(
        &cfg,
        format!(
            "task = \"basicity\"\nseed = 4\n[paths]\ndata = \"{}\"\nout = \"{}\"\n\
             [featurize]\nnbits = 64\n[model]\nhidden = [8]\nqubits = 4\n[train]\nepochs = 1\nfolds = 2\n",
            p(&data),
            p(&out)
        ),
    )
    .unwrap();
    ok(&["train-hqnn", "--config", p(&cfg), "--depth", "3"]);
    let m = read_json(&out.join("metrics.json"));
    assert_eq!((m["task"].as_str(), m["seed"].as_u64(), m["depth"].as_u64()), (Some("basicity"), Some(4), Some(3)));
    assert_eq!(m["quantum_params"], 12);
}
