//! Run configuration: built-in defaults, then a TOML file, then flags.

use std::path::{Path, PathBuf};

use hqnn_core::hybrid::TrainStrategy;
use hqnn_core::nn::TrainConfig;
use hqnn_core::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub task: String,
    pub seed: u64,
    pub threads: Option<usize>,
    pub strict: bool,
    pub paths: Paths,
    pub featurize: Featurize,
    pub model: Model,
    pub train: Train,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub data: Option<PathBuf>,
    pub out: Option<PathBuf>,
    /// Directory holding `backbone_fold{i}.json` from `pretrain`.
    pub backbone: Option<PathBuf>,
    /// Directory holding `hqnn_fold{i}.json` and `split.json`.
    pub checkpoints: Option<PathBuf>,
    pub noise_catalog: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Featurize {
    pub radius: usize,
    pub nbits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Model {
    pub hidden: Vec<usize>,
    pub dropout: f64,
    pub qubits: usize,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Train {
    pub batch_size: usize,
    pub lr: f64,
    pub epochs: usize,
    pub folds: usize,
    pub strategy: TrainStrategy,
    /// Catalog profile name, or `none`.
    pub noise: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            task: "default".into(),
            seed: 0,
            threads: None,
            strict: false,
            paths: Paths::default(),
            featurize: Featurize::default(),
            model: Model::default(),
            train: Train::default(),
        }
    }
}

impl Default for Featurize {
    fn default() -> Self {
        Self {
            radius: hqnn_core::chem::DEFAULT_RADIUS,
            nbits: hqnn_core::chem::DEFAULT_NBITS,
        }
    }
}

impl Default for Model {
    fn default() -> Self {
        Self {
            hidden: vec![1024, 512, 256],
            dropout: 0.1,
            qubits: 4,
            depth: 2,
        }
    }
}

impl Default for Train {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            batch_size: t.batch_size,
            lr: t.lr,
            epochs: t.epochs,
            folds: 5,
            strategy: TrainStrategy::Scratch,
            noise: "none".into(),
        }
    }
}

/// Flag values that override the file; `None` leaves the file value.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub data: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub backbone: Option<PathBuf>,
    pub checkpoints: Option<PathBuf>,
    pub noise_catalog: Option<PathBuf>,
    pub seed: Option<u64>,
    pub qubits: Option<usize>,
    pub depth: Option<usize>,
    pub strategy: Option<TrainStrategy>,
    pub noise: Option<String>,
    pub threads: Option<usize>,
    pub strict: bool,
    pub epochs: Option<usize>,
    pub folds: Option<usize>,
    pub batch_size: Option<usize>,
    pub lr: Option<f64>,
    pub hidden: Option<Vec<usize>>,
    pub dropout: Option<f64>,
    pub radius: Option<usize>,
    pub nbits: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))
    }

    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let mut config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read config {}: {e}", p.display())))?;
                Self::from_toml(&text)?
            }
            None => Self::default(),
        };
        config.apply(overrides);
        Ok(config)
    }

    pub fn apply(&mut self, o: &Overrides) {
        fn set<T: Clone>(slot: &mut T, value: &Option<T>) {
            if let Some(v) = value {
                *slot = v.clone();
            }
        }
        fn set_opt<T: Clone>(slot: &mut Option<T>, value: &Option<T>) {
            if value.is_some() {
                slot.clone_from(value);
            }
        }
        set_opt(&mut self.paths.data, &o.data);
        set_opt(&mut self.paths.out, &o.out);
        set_opt(&mut self.paths.backbone, &o.backbone);
        set_opt(&mut self.paths.checkpoints, &o.checkpoints);
        set_opt(&mut self.paths.noise_catalog, &o.noise_catalog);
        set_opt(&mut self.threads, &o.threads);
        set(&mut self.seed, &o.seed);
        set(&mut self.model.qubits, &o.qubits);
        set(&mut self.model.depth, &o.depth);
        set(&mut self.model.hidden, &o.hidden);
        set(&mut self.model.dropout, &o.dropout);
        set(&mut self.train.strategy, &o.strategy);
        set(&mut self.train.noise, &o.noise);
        set(&mut self.train.epochs, &o.epochs);
        set(&mut self.train.folds, &o.folds);
        set(&mut self.train.batch_size, &o.batch_size);
        set(&mut self.train.lr, &o.lr);
        set(&mut self.featurize.radius, &o.radius);
        set(&mut self.featurize.nbits, &o.nbits);
        self.strict |= o.strict;
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            batch_size: self.train.batch_size,
            lr: self.train.lr,
            epochs: self.train.epochs,
        }
    }

    /// Profile name, or `None` for noiseless runs.
    pub fn noise(&self) -> Option<&str> {
        match self.train.noise.as_str() {
            "" | "none" => None,
            name => Some(name),
        }
    }

    pub fn require<'a>(&self, value: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
        value
            .as_deref()
            .ok_or_else(|| Error::Config(format!("missing {flag}")))
    }

    pub fn existing<'a>(&self, value: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
        let path = self.require(value, flag)?;
        if !path.exists() {
            return Err(Error::Config(format!("{flag} {} does not exist", path.display())));
        }
        Ok(path)
    }

    pub fn validate(&self) -> Result<()> {
        self.train_config().check()?;
        if self.train.folds < 2 {
            return Err(Error::Config(format!("need at least 2 folds, got {}", self.train.folds)));
        }
        if !(0.0..1.0).contains(&self.model.dropout) {
            return Err(Error::Config(format!("dropout {} outside [0, 1)", self.model.dropout)));
        }
        if self.model.hidden.contains(&0) {
            return Err(Error::Config("hidden layer widths must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        if let Some(p) = &self.paths.noise_catalog {
            if !p.exists() {
                return Err(Error::Config(format!("noise catalog {} does not exist", p.display())));
            }
        }
        Ok(())
    }

    /// Extra checks for hybrid training.
    pub fn validate_hybrid(&self) -> Result<()> {
        self.validate()?;
        if self.train.strategy.needs_pretrained() {
            self.existing(&self.paths.backbone, "--backbone (required by finetune/frozen)")?;
        }
        if ![4, 9].contains(&self.model.qubits) {
            log::warn!("{} qubits; the reference configurations use 4 or 9", self.model.qubits);
        }
        Ok(())
    }
}
