//! Classical backbone + projection + quantum head.
//!
//! `features → backbone (MLP, activated last layer) → projection (→ n) →
//! arctan encoder → ansatz → Z-sum E → s = (E/n + 1)/2`, trained with MSE
//! against min-max scaled targets.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{mae, r2};
use crate::nn::{
    check_xy, eval_rng, Adam, DenseLayer, LayerGrad, MinMaxScaler, Mlp, MlpCache, MlpGrads, Mode,
    TrainConfig, CHECKPOINT_VERSION,
};
use crate::noise::{NoiseModel, NoiseProfile};
use crate::quantum::CircuitTemplate;
use crate::rng;
use crate::vqr::{self, Backend, VqrParams};
use crate::{Error, Result};

/// How the pretrained classical network is reused.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrainStrategy {
    /// HQSc: random initialization everywhere, everything trainable.
    Scratch,
    /// HQFi: pretrained backbone, everything trainable.
    Finetune,
    /// HQFr: pretrained backbone held fixed; projection and quantum head train.
    Frozen,
}

impl TrainStrategy {
    pub const ALL: [TrainStrategy; 3] = [Self::Scratch, Self::Finetune, Self::Frozen];

    pub fn label(self) -> &'static str {
        match self {
            Self::Scratch => "HQSc",
            Self::Finetune => "HQFi",
            Self::Frozen => "HQFr",
        }
    }

    pub fn backbone_trainable(self) -> bool {
        self != Self::Frozen
    }

    pub fn needs_pretrained(self) -> bool {
        self != Self::Scratch
    }
}

impl fmt::Display for TrainStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Scratch => "scratch",
            Self::Finetune => "finetune",
            Self::Frozen => "frozen",
        })
    }
}

impl FromStr for TrainStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "scratch" | "hqsc" => Ok(Self::Scratch),
            "finetune" | "hqfi" => Ok(Self::Finetune),
            "frozen" | "hqfr" => Ok(Self::Frozen),
            _ => Err(Error::Config(format!(
                "unknown strategy `{s}` (expected scratch, finetune or frozen)"
            ))),
        }
    }
}

pub enum BackboneSource {
    /// Randomly initialized feature extractor.
    Fresh {
        input_dim: usize,
        hidden: Vec<usize>,
        dropout: f64,
    },
    /// A trained regression MLP; its scalar head is removed.
    Pretrained(Mlp),
}

/// Affine readout `s = scale · E + offset` mapping `[−n, n]` onto `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputMap {
    pub scale: f64,
    pub offset: f64,
}

impl OutputMap {
    pub fn for_qubits(n_qubits: usize) -> Self {
        Self {
            scale: 0.5 / n_qubits as f64,
            offset: 0.5,
        }
    }

    pub fn apply(&self, expectation: f64) -> f64 {
        self.scale * expectation + self.offset
    }
}

#[derive(Clone, Debug)]
pub struct HybridModel {
    backbone: Mlp,
    projection: DenseLayer,
    template: CircuitTemplate,
    params: VqrParams,
    strategy: TrainStrategy,
    seed: u64,
    scaler: Option<MinMaxScaler>,
}

#[derive(Clone, Debug)]
pub struct HybridCache {
    backbone: MlpCache,
    hidden: Vec<f64>,
    pub embedding: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct HybridGrads {
    /// `None` when the backbone is frozen.
    pub backbone: Option<MlpGrads>,
    pub projection: LayerGrad,
    pub quantum: Vec<f64>,
}

impl HybridGrads {
    fn add(&mut self, other: &HybridGrads) {
        if let (Some(a), Some(b)) = (&mut self.backbone, &other.backbone) {
            a.add(b);
        }
        self.projection.add(&other.projection);
        for (a, b) in self.quantum.iter_mut().zip(&other.quantum) {
            *a += b;
        }
    }

    fn scale(&mut self, factor: f64) {
        if let Some(b) = &mut self.backbone {
            b.scale(factor);
        }
        self.projection.scale(factor);
        self.quantum.iter_mut().for_each(|q| *q *= factor);
    }

    /// Same order as [`HybridModel::trainable_params_mut`].
    pub fn slices(&self) -> Vec<&[f64]> {
        let mut out = self.backbone.as_ref().map(MlpGrads::slices).unwrap_or_default();
        out.push(&self.projection.weights);
        out.push(&self.projection.bias);
        out.push(&self.quantum);
        out
    }
}

/// Prediction, loss and gradients of one sample.
#[derive(Clone, Debug)]
pub struct SampleGrad {
    pub prediction: f64,
    pub loss: f64,
    pub grads: HybridGrads,
}

impl HybridModel {
    /// Builds a hybrid model; `n_qubits ∈ 2..=12`, `depth ≥ 0`.
    ///
    /// Scratch with a pretrained source reuses only its architecture.
    pub fn compose(
        source: BackboneSource,
        n_qubits: usize,
        depth: usize,
        strategy: TrainStrategy,
        seed: u64,
    ) -> Result<Self> {
        if !(2..=crate::quantum::MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::Config(format!(
                "quantum head needs 2..={} qubits, got {n_qubits}",
                crate::quantum::MAX_QUBITS
            )));
        }
        let mut init = rng::substream(seed, rng::INIT);
        let backbone = match (source, strategy) {
            (BackboneSource::Pretrained(mlp), s) if s.needs_pretrained() => mlp.into_backbone()?,
            (BackboneSource::Pretrained(mlp), _) => {
                let backbone = mlp.into_backbone()?;
                let hidden: Vec<usize> = backbone.layers().iter().map(|l| l.out_dim).collect();
                Mlp::backbone(backbone.input_dim(), &hidden, backbone.dropout(), &mut init)?
            }
            (BackboneSource::Fresh { .. }, s) if s.needs_pretrained() => {
                return Err(Error::Config(format!(
                    "strategy {s} ({}) requires a pretrained backbone checkpoint",
                    s.label()
                )))
            }
            (
                BackboneSource::Fresh {
                    input_dim,
                    hidden,
                    dropout,
                },
                _,
            ) => Mlp::backbone(input_dim, &hidden, dropout, &mut init)?,
        };
        let projection = DenseLayer::kaiming_uniform(backbone.output_dim(), n_qubits, &mut init);
        let template = CircuitTemplate::new(n_qubits, depth)?;
        let params = VqrParams::random(&template, &mut init);
        Ok(Self {
            backbone,
            projection,
            template,
            params,
            strategy,
            seed,
            scaler: None,
        })
    }

    /// Assembles a model from explicit parts (checkpoints, tests).
    pub fn from_parts(
        backbone: Mlp,
        projection: DenseLayer,
        template: CircuitTemplate,
        params: VqrParams,
        strategy: TrainStrategy,
        seed: u64,
    ) -> Result<Self> {
        backbone.check()?;
        projection.check()?;
        params.check(&template)?;
        if projection.in_dim != backbone.output_dim() {
            return Err(Error::shape("projection input", backbone.output_dim(), projection.in_dim));
        }
        if projection.out_dim != template.n_qubits() {
            return Err(Error::shape("projection output", template.n_qubits(), projection.out_dim));
        }
        Ok(Self {
            backbone,
            projection,
            template,
            params,
            strategy,
            seed,
            scaler: None,
        })
    }

    pub fn backbone(&self) -> &Mlp {
        &self.backbone
    }

    pub fn projection(&self) -> &DenseLayer {
        &self.projection
    }

    pub fn template(&self) -> &CircuitTemplate {
        &self.template
    }

    pub fn params(&self) -> &VqrParams {
        &self.params
    }

    pub fn strategy(&self) -> TrainStrategy {
        self.strategy
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn scaler(&self) -> Option<&MinMaxScaler> {
        self.scaler.as_ref()
    }

    pub fn set_scaler(&mut self, scaler: MinMaxScaler) {
        self.scaler = Some(scaler);
    }

    pub fn output_map(&self) -> OutputMap {
        OutputMap::for_qubits(self.template.n_qubits())
    }

    pub fn input_dim(&self) -> usize {
        self.backbone.input_dim()
    }

    pub fn quantum_param_count(&self) -> usize {
        self.params.len()
    }

    /// Backbone (unless frozen) + projection + quantum parameters.
    pub fn trainable_param_count(&self) -> usize {
        let backbone = if self.strategy.backbone_trainable() {
            self.backbone.n_params()
        } else {
            0
        };
        backbone + self.projection.n_params() + self.params.len()
    }

    pub fn trainable_params_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = if self.strategy.backbone_trainable() {
            self.backbone.params_mut()
        } else {
            Vec::new()
        };
        let [w, b] = self.projection.params_mut();
        out.push(w);
        out.push(b);
        out.push(&mut self.params.0);
        out
    }

    /// Embedding fed to the encoder.
    pub fn embed(&self, features: &[f64], mode: Mode, rng: &mut rng::Rng) -> Result<HybridCache> {
        let (hidden, backbone) = self.backbone.forward(features, mode, rng)?;
        let embedding = self.projection.forward(&hidden)?;
        Ok(HybridCache {
            backbone,
            hidden,
            embedding,
        })
    }

    /// Scaled prediction in `[0, 1]`.
    pub fn forward(
        &self,
        features: &[f64],
        mode: Mode,
        rng: &mut rng::Rng,
        backend: &Backend,
    ) -> Result<f64> {
        let cache = self.embed(features, mode, rng)?;
        let e = vqr::vqr_forward(&cache.embedding, &self.params, &self.template, backend)?;
        Ok(self.output_map().apply(e))
    }

    /// Squared-error loss against a scaled target and its gradient with
    /// respect to every trainable parameter.
    pub fn loss_and_grad(
        &self,
        features: &[f64],
        target: f64,
        mode: Mode,
        rng: &mut rng::Rng,
        backend: &Backend,
    ) -> Result<SampleGrad> {
        let cache = self.embed(features, mode, rng)?;
        let (e, vg) = vqr::value_and_grad(&cache.embedding, &self.params, &self.template, backend)?;
        let map = self.output_map();
        let prediction = map.apply(e);
        let residual = prediction - target;
        // dL/dE = 2(s − t) · ds/dE, ds/dE = 1/(2n)
        let d_e = 2.0 * residual * map.scale;

        let quantum = vg.d_params.iter().map(|g| d_e * g).collect();
        let d_embedding: Vec<f64> = vg.d_inputs.iter().map(|g| d_e * g).collect();
        let mut projection = LayerGrad::zeros_like(&self.projection);
        let d_hidden = self.projection.backward(&cache.hidden, &d_embedding, &mut projection);
        let backbone = if self.strategy.backbone_trainable() {
            Some(self.backbone.backward(&cache.backbone, &d_hidden)?.0)
        } else {
            None
        };
        Ok(SampleGrad {
            prediction,
            loss: residual * residual,
            grads: HybridGrads {
                backbone,
                projection,
                quantum,
            },
        })
    }

    /// Eval-mode predictions in original target units.
    pub fn predict(&self, x: &[Vec<f64>], backend: &Backend) -> Result<Vec<f64>> {
        let scaler = self
            .scaler
            .ok_or_else(|| Error::Config("model has no target scaler; train it first".into()))?;
        x.par_iter()
            .map(|row| {
                let mut r = eval_rng();
                Ok(scaler.inverse(self.forward(row, Mode::Eval, &mut r, backend)?))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    /// Mean scaled MSE of the epoch's training passes (`None` for the
    /// initial model).
    pub loss: Option<f64>,
    pub train_r2: f64,
    pub train_mae: f64,
    pub test_r2: Option<f64>,
    pub test_mae: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct TrainedHybrid {
    pub model: HybridModel,
    /// Entry 0 is the initial model, then one entry per epoch.
    pub history: Vec<EpochMetrics>,
}

pub struct Fold<'a> {
    pub x: &'a [Vec<f64>],
    pub y: &'a [f64],
}

fn backend_for(noise: Option<&NoiseProfile>) -> Result<Backend> {
    Ok(match noise {
        Some(p) => Backend::noisy(NoiseModel::new(p)?),
        None => Backend::Exact,
    })
}

fn evaluate(
    model: &HybridModel,
    fold: &Fold<'_>,
    backend: &Backend,
) -> Result<(f64, f64)> {
    let pred = model.predict(fold.x, backend)?;
    Ok((r2(fold.y, &pred)?, mae(fold.y, &pred)?))
}

fn metrics(
    model: &HybridModel,
    epoch: usize,
    loss: Option<f64>,
    train: &Fold<'_>,
    test: Option<&Fold<'_>>,
    backend: &Backend,
) -> Result<EpochMetrics> {
    let (train_r2, train_mae) = evaluate(model, train, backend)?;
    let (test_r2, test_mae) = match test {
        Some(t) => {
            let (a, b) = evaluate(model, t, backend)?;
            (Some(a), Some(b))
        }
        None => (None, None),
    };
    Ok(EpochMetrics {
        epoch,
        loss,
        train_r2,
        train_mae,
        test_r2,
        test_mae,
    })
}

/// Minibatch Adam over the strategy's trainable parameters.
///
/// With `noise`, forward passes and parameter-shift gradients run on the
/// density-matrix simulator. Per-sample work runs in parallel; gradients are
/// summed in sample order so results do not depend on the thread count.
pub fn train_hybrid(
    mut model: HybridModel,
    train: Fold<'_>,
    test: Option<Fold<'_>>,
    config: &TrainConfig,
    noise: Option<&NoiseProfile>,
    seed: u64,
) -> Result<TrainedHybrid> {
    config.check()?;
    check_xy(train.x, train.y, model.input_dim())?;
    if let Some(t) = &test {
        check_xy(t.x, t.y, model.input_dim())?;
    }
    let backend = backend_for(noise)?;
    let scaler = MinMaxScaler::fit(train.y)?;
    model.set_scaler(scaler);
    let targets = scaler.scale_all(train.y);

    let mut shuffle = rng::substream(seed, rng::SHUFFLE);
    let dropout_seed = rng::substream_seed(seed, rng::DROPOUT);
    let mut adam = Adam::new(config.adam());
    let mut order: Vec<usize> = (0..train.x.len()).collect();
    let mut history = Vec::with_capacity(config.epochs + 1);
    history.push(metrics(&model, 0, None, &train, test.as_ref(), &backend)?);

    for epoch in 0..config.epochs {
        use rand::seq::SliceRandom;
        order.shuffle(&mut shuffle);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            let samples: Vec<SampleGrad> = batch
                .par_iter()
                .map(|&i| {
                    let mut r = rng::indexed(dropout_seed, &[epoch as u64, i as u64]);
                    model.loss_and_grad(&train.x[i], targets[i], Mode::Train, &mut r, &backend)
                })
                .collect::<Result<_>>()?;
            let mut iter = samples.into_iter();
            let first = iter.next().expect("chunks are non-empty");
            epoch_loss += first.loss;
            let mut grads = first.grads;
            for s in iter {
                epoch_loss += s.loss;
                grads.add(&s.grads);
            }
            grads.scale(1.0 / batch.len() as f64);
            adam.step(&mut model.trainable_params_mut(), &grads.slices())?;
        }
        let loss = epoch_loss / train.x.len() as f64;
        if !loss.is_finite() {
            return Err(Error::Domain(format!("training diverged at epoch {epoch}")));
        }
        history.push(metrics(&model, epoch + 1, Some(loss), &train, test.as_ref(), &backend)?);
    }
    Ok(TrainedHybrid { model, history })
}

pub const HYBRID_CHECKPOINT_FORMAT: &str = "hqnn-hybrid";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridCheckpoint {
    pub format: String,
    pub version: u32,
    pub strategy: TrainStrategy,
    pub n_qubits: usize,
    pub depth: usize,
    pub seed: u64,
    pub output_map: OutputMap,
    pub scaler: Option<MinMaxScaler>,
    pub backbone: Mlp,
    pub projection: DenseLayer,
    pub quantum_params: VqrParams,
}

impl HybridCheckpoint {
    pub fn new(model: &HybridModel) -> Self {
        Self {
            format: HYBRID_CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            strategy: model.strategy,
            n_qubits: model.template.n_qubits(),
            depth: model.template.depth(),
            seed: model.seed,
            output_map: model.output_map(),
            scaler: model.scaler,
            backbone: model.backbone.clone(),
            projection: model.projection.clone(),
            quantum_params: model.params.clone(),
        }
    }

    pub fn into_model(self) -> Result<HybridModel> {
        if self.format != HYBRID_CHECKPOINT_FORMAT {
            return Err(Error::Checkpoint(format!(
                "expected format `{HYBRID_CHECKPOINT_FORMAT}`, found `{}`",
                self.format
            )));
        }
        if self.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {}", self.version)));
        }
        if self.output_map != OutputMap::for_qubits(self.n_qubits) {
            return Err(Error::Checkpoint("output map does not match qubit count".into()));
        }
        let template = CircuitTemplate::new(self.n_qubits, self.depth)?;
        let mut model = HybridModel::from_parts(
            self.backbone,
            self.projection,
            template,
            self.quantum_params,
            self.strategy,
            self.seed,
        )?;
        model.scaler = self.scaler;
        Ok(model)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<HybridModel> {
        Self::from_json(&std::fs::read_to_string(path)?)?.into_model()
    }
}
