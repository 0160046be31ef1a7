use std::io::Write;
use std::path::{Path, PathBuf};

use hqnn_core::data::{
    mae, r2, relative_performance, relative_performance_csv, stratified_kfold, Dataset,
    FoldMetrics, FoldSplit, MetricsReport, RelativeRow,
};
use hqnn_core::hybrid::{
    train_hybrid, BackboneSource, Fold, HybridCheckpoint, HybridModel, TrainStrategy,
};
use hqnn_core::nn::{train_mlp, Mlp, MlpCheckpoint};
use hqnn_core::noise::{default_profiles, load_profiles, NoiseModel, NoiseProfile};
use hqnn_core::vqr::Backend;
use hqnn_core::{rng, Error, Result};
use indexmap::IndexMap;

use crate::config::RunConfig;
use crate::output::{hash_bytes, load_report, write_json, FoldRecord, RunMetrics, METRICS_FORMAT, METRICS_VERSION};

pub const SPLIT_FILE: &str = "split.json";
pub const METRICS_FILE: &str = "metrics.json";

pub fn backbone_file(fold: usize) -> String {
    format!("backbone_fold{fold}.json")
}

pub fn hqnn_file(fold: usize) -> String {
    format!("hqnn_fold{fold}.json")
}

fn fold_seed(seed: u64, fold: usize) -> u64 {
    rng::substream_seed(seed, &format!("fold{fold}"))
}

fn log_failures(failures: &[(usize, Error)]) {
    for (row, e) in failures {
        log::warn!("data row {row}: {e}");
    }
}

/// Dataset ready for training: featurized, with one feature length.
struct Prepared {
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    scaffolds: Vec<u64>,
}

fn prepare(config: &RunConfig) -> Result<Prepared> {
    let path = config.existing(&config.paths.data, "--data")?;
    let mut data = Dataset::load_csv(path)?;
    if data.is_empty() {
        return Err(Error::Data {
            row: 0,
            message: format!("{} has no rows", path.display()),
        });
    }
    if let Some(s) = data.summary() {
        log::info!("loaded {} rows, y in [{}, {}]", s.count, s.y_min, s.y_max);
    }
    let failures = data.featurize(config.featurize.radius, config.featurize.nbits);
    if let Some((row, e)) = failures.first() {
        log_failures(&failures);
        return Err(Error::Data {
            row: *row,
            message: format!("cannot featurize: {e}"),
        });
    }
    Ok(Prepared {
        x: data.features()?,
        y: data.targets(),
        scaffolds: data.scaffold_keys()?,
    })
}

fn select<T: Clone>(v: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| v[i].clone()).collect()
}

fn out_dir(config: &RunConfig) -> Result<PathBuf> {
    let dir = config.require(&config.paths.out, "--out")?.to_path_buf();
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn profiles(config: &RunConfig) -> Result<IndexMap<String, NoiseProfile>> {
    match &config.paths.noise_catalog {
        Some(p) => load_profiles(p),
        None => Ok(default_profiles()),
    }
}

fn noise_profile(config: &RunConfig) -> Result<Option<NoiseProfile>> {
    let Some(name) = config.noise() else {
        return Ok(None);
    };
    let catalog = profiles(config)?;
    catalog.get(name).cloned().map(Some).ok_or_else(|| {
        Error::Config(format!(
            "unknown noise profile `{name}` (available: {})",
            catalog.keys().cloned().collect::<Vec<_>>().join(", ")
        ))
    })
}

fn fold_metrics(
    ytr: &[f64],
    ptr: &[f64],
    yte: &[f64],
    pte: &[f64],
) -> Result<FoldMetrics> {
    Ok(FoldMetrics {
        train_r2: r2(ytr, ptr)?,
        train_mae: mae(ytr, ptr)?,
        test_r2: r2(yte, pte)?,
        test_mae: mae(yte, pte)?,
    })
}

fn summarize(report: &MetricsReport) {
    println!(
        "{}: test R2 {:.4} ± {:.4}, test MAE {:.4} ± {:.4}",
        report.label, report.mean.test_r2, report.std.test_r2, report.mean.test_mae, report.std.test_mae
    );
}

pub fn featurize(config: &RunConfig) -> Result<()> {
    let input = config.existing(&config.paths.data, "--data")?;
    let out = config.require(&config.paths.out, "--out")?;
    let mut data = Dataset::load_csv(input)?;
    let failures = data.featurize(config.featurize.radius, config.featurize.nbits);
    log_failures(&failures);
    if config.strict {
        if let Some((row, e)) = failures.first() {
            return Err(Error::Data {
                row: *row,
                message: e.to_string(),
            });
        }
    }
    let before = data.len();
    data.rows.retain(|r| r.features.is_some());
    if data.len() < before {
        log::warn!("dropped {} rows that could not be featurized", before - data.len());
    }
    std::fs::write(out, data.to_csv()?)?;
    if let Some(s) = data.summary() {
        log::info!("wrote {} rows, y in [{}, {}]", s.count, s.y_min, s.y_max);
    }
    println!("featurized {} of {before} rows", data.len());
    Ok(())
}

fn split_for(config: &RunConfig, prepared: &Prepared) -> Result<FoldSplit> {
    stratified_kfold(&prepared.scaffolds, &prepared.y, config.train.folds, config.seed)
}

pub fn pretrain(config: &RunConfig) -> Result<()> {
    config.validate()?;
    let data = prepare(config)?;
    let dir = out_dir(config)?;
    let split = split_for(config, &data)?;
    let train_cfg = config.train_config();
    let input_dim = data.x[0].len();
    let mut per_fold = Vec::new();
    let mut records = Vec::new();
    let mut n_params = 0;
    for fold in 0..split.k {
        let (tr, te) = (split.train_indices(fold), split.test_indices(fold));
        let (xtr, ytr) = (select(&data.x, &tr), select(&data.y, &tr));
        let (xte, yte) = (select(&data.x, &te), select(&data.y, &te));
        let seed = fold_seed(config.seed, fold);
        let mut init = rng::substream(seed, rng::INIT);
        let model = Mlp::new(input_dim, &config.model.hidden, 1, config.model.dropout, &mut init)?;
        n_params = model.n_params();
        let trained = train_mlp(model, &xtr, &ytr, &train_cfg, seed)?;
        let m = fold_metrics(&ytr, &trained.predict(&xtr)?, &yte, &trained.predict(&xte)?)?;
        log::info!("fold {fold}: train R2 {:.4}, test R2 {:.4}, test MAE {:.4}", m.train_r2, m.test_r2, m.test_mae);
        per_fold.push(m);
        let name = backbone_file(fold);
        MlpCheckpoint::new(&trained, seed).save(dir.join(&name))?;
        records.push(FoldRecord {
            fold,
            train_size: tr.len(),
            test_size: te.len(),
            checkpoint: name,
            backbone_hash_before: None,
            backbone_hash_after: Some(hash_bytes(&trained.model.param_bytes())),
        });
    }
    let report = MetricsReport::from_folds("MLP", per_fold)?;
    summarize(&report);
    write_json(&dir.join(SPLIT_FILE), &split)?;
    write_json(
        &dir.join(METRICS_FILE),
        &RunMetrics {
            format: METRICS_FORMAT.into(),
            version: METRICS_VERSION,
            command: "pretrain".into(),
            task: config.task.clone(),
            seed: config.seed,
            noise: None,
            strategy: None,
            n_qubits: None,
            depth: None,
            quantum_params: None,
            trainable_params: n_params,
            report,
            folds: records,
        },
    )
}

pub fn hybrid_label(strategy: TrainStrategy, n_qubits: usize) -> String {
    format!("{} ({n_qubits}Q)", strategy.label())
}

fn with_noise(label: String, noise: Option<&NoiseProfile>) -> String {
    match noise {
        Some(p) => format!("{label} [{}]", p.name),
        None => label,
    }
}

pub fn train_hqnn(config: &RunConfig) -> Result<()> {
    config.validate_hybrid()?;
    let noise = noise_profile(config)?;
    let data = prepare(config)?;
    let dir = out_dir(config)?;
    let split = split_for(config, &data)?;
    let train_cfg = config.train_config();
    let strategy = config.train.strategy;
    let label = with_noise(hybrid_label(strategy, config.model.qubits), noise.as_ref());
    let mut per_fold = Vec::new();
    let mut records = Vec::new();
    let (mut quantum, mut trainable) = (0, 0);
    for fold in 0..split.k {
        let (tr, te) = (split.train_indices(fold), split.test_indices(fold));
        let (xtr, ytr) = (select(&data.x, &tr), select(&data.y, &tr));
        let (xte, yte) = (select(&data.x, &te), select(&data.y, &te));
        let seed = fold_seed(config.seed, fold);
        let source = match &config.paths.backbone {
            Some(b) => BackboneSource::Pretrained(MlpCheckpoint::load(b.join(backbone_file(fold)))?.model),
            None => BackboneSource::Fresh {
                input_dim: data.x[0].len(),
                hidden: config.model.hidden.clone(),
                dropout: config.model.dropout,
            },
        };
        let model = HybridModel::compose(source, config.model.qubits, config.model.depth, strategy, seed)?;
        quantum = model.quantum_param_count();
        trainable = model.trainable_param_count();
        if fold == 0 {
            log::info!("{label}: {quantum} quantum parameters, {trainable} trainable in total");
        }
        let before = hash_bytes(&model.backbone().param_bytes());
        let trained = train_hybrid(
            model,
            Fold { x: &xtr, y: &ytr },
            Some(Fold { x: &xte, y: &yte }),
            &train_cfg,
            noise.as_ref(),
            seed,
        )?;
        let after = hash_bytes(&trained.model.backbone().param_bytes());
        if strategy == TrainStrategy::Frozen {
            log::info!("fold {fold}: backbone hash {after} (unchanged: {})", before == after);
        }
        let last = trained.history.last().expect("history holds the initial model");
        let m = FoldMetrics {
            train_r2: last.train_r2,
            train_mae: last.train_mae,
            test_r2: last.test_r2.expect("test fold supplied"),
            test_mae: last.test_mae.expect("test fold supplied"),
        };
        log::info!("fold {fold}: train R2 {:.4}, test R2 {:.4}, test MAE {:.4}", m.train_r2, m.test_r2, m.test_mae);
        per_fold.push(m);
        let name = hqnn_file(fold);
        HybridCheckpoint::new(&trained.model).save(dir.join(&name))?;
        records.push(FoldRecord {
            fold,
            train_size: tr.len(),
            test_size: te.len(),
            checkpoint: name,
            backbone_hash_before: Some(before),
            backbone_hash_after: Some(after),
        });
    }
    println!("{label}: {quantum} quantum parameters");
    let report = MetricsReport::from_folds(label, per_fold)?;
    summarize(&report);
    write_json(&dir.join(SPLIT_FILE), &split)?;
    write_json(
        &dir.join(METRICS_FILE),
        &RunMetrics {
            format: METRICS_FORMAT.into(),
            version: METRICS_VERSION,
            command: "train-hqnn".into(),
            task: config.task.clone(),
            seed: config.seed,
            noise: noise.map(|p| p.name),
            strategy: Some(strategy.to_string()),
            n_qubits: Some(config.model.qubits),
            depth: Some(config.model.depth),
            quantum_params: Some(quantum),
            trainable_params: trainable,
            report,
            folds: records,
        },
    )
}

enum Saved {
    Classical(MlpCheckpoint),
    Hybrid(Box<HybridModel>),
}

fn load_fold(dir: &Path, fold: usize) -> Result<Saved> {
    let hybrid = dir.join(hqnn_file(fold));
    if hybrid.exists() {
        return Ok(Saved::Hybrid(Box::new(HybridCheckpoint::load(hybrid)?)));
    }
    let classical = dir.join(backbone_file(fold));
    if classical.exists() {
        return Ok(Saved::Classical(MlpCheckpoint::load(classical)?));
    }
    Err(Error::Config(format!("no checkpoint for fold {fold} in {}", dir.display())))
}

/// Re-evaluates saved fold checkpoints, optionally under a noise profile.
pub fn evaluate(config: &RunConfig) -> Result<()> {
    config.validate()?;
    let dir = config.existing(&config.paths.checkpoints, "--checkpoints")?;
    let out = config.require(&config.paths.out, "--out")?;
    let noise = noise_profile(config)?;
    let backend = match &noise {
        Some(p) => Backend::noisy(NoiseModel::new(p)?),
        None => Backend::Exact,
    };
    let data = prepare(config)?;
    let split: FoldSplit = serde_json::from_str(&std::fs::read_to_string(dir.join(SPLIT_FILE))?)?;
    if split.assignments.len() != data.y.len() {
        return Err(Error::Config(format!(
            "split covers {} rows but the dataset has {}",
            split.assignments.len(),
            data.y.len()
        )));
    }
    let mut per_fold = Vec::new();
    let mut records = Vec::new();
    let mut label = String::from("MLP");
    let mut shape = (None, None, None, None, 0);
    for fold in 0..split.k {
        let (tr, te) = (split.train_indices(fold), split.test_indices(fold));
        let (xtr, ytr) = (select(&data.x, &tr), select(&data.y, &tr));
        let (xte, yte) = (select(&data.x, &te), select(&data.y, &te));
        let (ptr, pte) = match load_fold(dir, fold)? {
            Saved::Classical(c) => {
                shape.4 = c.model.n_params();
                (
                    hqnn_core::nn::predict(&c.model, &c.scaler, &xtr)?,
                    hqnn_core::nn::predict(&c.model, &c.scaler, &xte)?,
                )
            }
            Saved::Hybrid(m) => {
                label = hybrid_label(m.strategy(), m.template().n_qubits());
                shape = (
                    Some(m.strategy().to_string()),
                    Some(m.template().n_qubits()),
                    Some(m.template().depth()),
                    Some(m.quantum_param_count()),
                    m.trainable_param_count(),
                );
                (m.predict(&xtr, &backend)?, m.predict(&xte, &backend)?)
            }
        };
        per_fold.push(fold_metrics(&ytr, &ptr, &yte, &pte)?);
        records.push(FoldRecord {
            fold,
            train_size: tr.len(),
            test_size: te.len(),
            checkpoint: load_name(dir, fold),
            backbone_hash_before: None,
            backbone_hash_after: None,
        });
    }
    let report = MetricsReport::from_folds(with_noise(label, noise.as_ref()), per_fold)?;
    summarize(&report);
    write_json(
        out,
        &RunMetrics {
            format: METRICS_FORMAT.into(),
            version: METRICS_VERSION,
            command: "evaluate".into(),
            task: config.task.clone(),
            seed: split.seed,
            noise: noise.map(|p| p.name),
            strategy: shape.0,
            n_qubits: shape.1,
            depth: shape.2,
            quantum_params: shape.3,
            trainable_params: shape.4,
            report,
            folds: records,
        },
    )
}

fn load_name(dir: &Path, fold: usize) -> String {
    if dir.join(hqnn_file(fold)).exists() {
        hqnn_file(fold)
    } else {
        backbone_file(fold)
    }
}

pub struct ReportArgs<'a> {
    pub classical: &'a Path,
    pub hqnn: &'a [PathBuf],
    pub property: &'a str,
    pub model: &'a str,
    pub out: Option<&'a Path>,
}

pub fn report(args: &ReportArgs<'_>) -> Result<()> {
    if args.hqnn.is_empty() {
        return Err(Error::Config("report needs at least one --hqnn metrics file".into()));
    }
    let classical = load_report(args.classical)?;
    let mut entries = Vec::new();
    for path in args.hqnn {
        let hybrid = load_report(path)?;
        if hybrid.per_fold.len() != classical.per_fold.len() {
            return Err(Error::Config(format!(
                "{} has {} folds but the classical report has {}",
                path.display(),
                hybrid.per_fold.len(),
                classical.per_fold.len()
            )));
        }
        let rel = relative_performance(&classical, &hybrid)?;
        entries.push((hybrid.label.clone(), rel));
    }
    let text = relative_performance_csv(&[RelativeRow {
        property: args.property.into(),
        model: args.model.into(),
        entries,
    }])?;
    match args.out {
        Some(p) => std::fs::write(p, &text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn noise_catalog(config: &RunConfig, json: bool) -> Result<()> {
    let catalog = profiles(config)?;
    let text = if json {
        let mut t = serde_json::to_string_pretty(&catalog.values().collect::<Vec<_>>())?;
        t.push('\n');
        t
    } else {
        let mut t = format!(
            "{:<16} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>8} {:>8}\n",
            "name", "2q error", "sx error", "readout", "T1 (s)", "T2 (s)", "gate (s)", "gamma", "lambda"
        );
        for p in catalog.values() {
            t.push_str(&format!(
                "{:<16} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e} {:>8.2e} {:>8.2e}\n",
                p.name,
                p.two_qubit_error,
                p.sx_error,
                p.readout_error,
                p.t1_seconds,
                p.t2_seconds,
                p.gate_time_seconds,
                p.amplitude_damping_gamma(),
                p.phase_damping_lambda()
            ));
        }
        t
    };
    match &config.paths.out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}
