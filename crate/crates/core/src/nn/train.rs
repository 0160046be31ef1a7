use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::adam::{Adam, AdamConfig};
use super::mlp::{Mlp, MlpGrads, Mode};
use super::scaler::MinMaxScaler;
use crate::rng;
use crate::{Error, Result};

/// Fixed training hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub lr: f64,
    pub epochs: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 128,
            lr: 0.001,
            epochs: 300,
        }
    }
}

impl TrainConfig {
    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            lr: self.lr,
            ..AdamConfig::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::Config(format!("learning rate {} must be positive", self.lr)));
        }
        Ok(())
    }
}

/// Hidden-layer configurations searched for the fingerprint MLP.
pub const HIDDEN_LAYER_GRID: [&[usize]; 6] = [
    &[2048, 1024, 512, 256, 128],
    &[2048, 1024, 512, 256],
    &[2048, 1024, 512],
    &[1024, 1024, 1024],
    &[1024, 512, 256, 128],
    &[1024, 512, 256],
];

pub const DROPOUT_GRID: [f64; 2] = [0.1, 0.2];

/// Every (hidden layers, dropout) combination of the search grid.
pub fn hyperparameter_grid() -> Vec<(Vec<usize>, f64)> {
    HIDDEN_LAYER_GRID
        .iter()
        .flat_map(|h| DROPOUT_GRID.iter().map(move |&d| (h.to_vec(), d)))
        .collect()
}

#[derive(Clone, Debug)]
pub struct TrainedMlp {
    pub model: Mlp,
    pub scaler: MinMaxScaler,
    /// Mean scaled-target MSE over each epoch (train mode).
    pub history: Vec<f64>,
}

impl TrainedMlp {
    /// Eval-mode predictions in original target units.
    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        predict(&self.model, &self.scaler, x)
    }
}

pub(crate) fn eval_rng() -> rng::Rng {
    rng::Rng::seed_from_u64(0)
}

pub fn predict(model: &Mlp, scaler: &MinMaxScaler, x: &[Vec<f64>]) -> Result<Vec<f64>> {
    let mut r = eval_rng();
    x.iter()
        .map(|row| Ok(scaler.inverse(model.forward(row, Mode::Eval, &mut r)?.0[0])))
        .collect()
}

pub(crate) fn check_xy(x: &[Vec<f64>], y: &[f64], input_dim: usize) -> Result<()> {
    if x.is_empty() {
        return Err(Error::Config("training fold is empty".into()));
    }
    if x.len() != y.len() {
        return Err(Error::shape("targets", x.len(), y.len()));
    }
    if let Some(row) = x.iter().find(|r| r.len() != input_dim) {
        return Err(Error::shape("feature vector", input_dim, row.len()));
    }
    Ok(())
}

/// Minibatch Adam on MSE against min-max scaled targets.
///
/// Minibatch order comes from the `shuffle` substream of `seed`; dropout masks
/// from the `dropout` substream indexed by (epoch, sample). The final short
/// batch is kept.
pub fn train_mlp(
    mut model: Mlp,
    x: &[Vec<f64>],
    y: &[f64],
    config: &TrainConfig,
    seed: u64,
) -> Result<TrainedMlp> {
    config.check()?;
    check_xy(x, y, model.input_dim())?;
    if model.output_dim() != 1 {
        return Err(Error::Config(format!(
            "regression MLP must have one output, has {}",
            model.output_dim()
        )));
    }
    let scaler = MinMaxScaler::fit(y)?;
    let targets = scaler.scale_all(y);
    let mut shuffle = rng::substream(seed, rng::SHUFFLE);
    let dropout_seed = rng::substream_seed(seed, rng::DROPOUT);
    let mut adam = Adam::new(config.adam());
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut history = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        order.shuffle(&mut shuffle);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            let mut grads = MlpGrads::zeros_like(&model);
            let scale = 2.0 / batch.len() as f64;
            for &i in batch {
                let mut r = rng::indexed(dropout_seed, &[epoch as u64, i as u64]);
                let (out, cache) = model.forward(&x[i], Mode::Train, &mut r)?;
                let err = out[0] - targets[i];
                epoch_loss += err * err;
                let (g, _) = model.backward(&cache, &[scale * err])?;
                grads.add(&g);
            }
            adam.step(&mut model.params_mut(), &grads.slices())?;
        }
        let loss = epoch_loss / x.len() as f64;
        if !loss.is_finite() {
            return Err(Error::Domain(format!("training diverged at epoch {epoch}")));
        }
        history.push(loss);
    }
    Ok(TrainedMlp {
        model,
        scaler,
        history,
    })
}

pub const MLP_CHECKPOINT_FORMAT: &str = "hqnn-mlp";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Serialized MLP with its target scaler and training seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpCheckpoint {
    pub format: String,
    pub version: u32,
    pub seed: u64,
    pub scaler: MinMaxScaler,
    pub model: Mlp,
}

impl MlpCheckpoint {
    pub fn new(trained: &TrainedMlp, seed: u64) -> Self {
        Self {
            format: MLP_CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            seed,
            scaler: trained.scaler,
            model: trained.model.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ckpt: Self = serde_json::from_str(text)?;
        if ckpt.format != MLP_CHECKPOINT_FORMAT {
            return Err(Error::Checkpoint(format!(
                "expected format `{MLP_CHECKPOINT_FORMAT}`, found `{}`",
                ckpt.format
            )));
        }
        if ckpt.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {}", ckpt.version)));
        }
        ckpt.model.check()?;
        Ok(ckpt)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
