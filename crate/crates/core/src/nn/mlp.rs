use rand::Rng;
use serde::{Deserialize, Serialize};

use super::layer::{DenseLayer, LayerGrad};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Dropout active.
    Train,
    /// Deterministic.
    Eval,
}

/// Feed-forward network: ReLU and inverted dropout after every hidden layer.
///
/// When `activate_last` is set the final layer is treated as hidden too; this
/// is how a regression MLP with its scalar head removed serves as a feature
/// extractor.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Mlp {
    layers: Vec<DenseLayer>,
    dropout: f64,
    activate_last: bool,
    /// Bumped whenever parameters may have changed; stale caches are rejected.
    #[serde(skip)]
    generation: u64,
}

impl PartialEq for Mlp {
    fn eq(&self, other: &Self) -> bool {
        self.layers == other.layers
            && self.dropout == other.dropout
            && self.activate_last == other.activate_last
    }
}

/// Intermediate values of one forward pass.
#[derive(Clone, Debug)]
pub struct MlpCache {
    generation: u64,
    inputs: Vec<Vec<f64>>,
    pre_activations: Vec<Vec<f64>>,
    /// Inverted-dropout multipliers (`0` or `1/(1−p)`) per activated layer.
    masks: Vec<Option<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MlpGrads {
    pub layers: Vec<LayerGrad>,
}

impl MlpGrads {
    pub fn zeros_like(model: &Mlp) -> Self {
        Self {
            layers: model.layers.iter().map(LayerGrad::zeros_like).collect(),
        }
    }

    pub fn add(&mut self, other: &MlpGrads) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            a.add(b);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        self.layers.iter_mut().for_each(|l| l.scale(factor));
    }

    /// Same order as [`Mlp::params_mut`].
    pub fn slices(&self) -> Vec<&[f64]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.as_slice(), l.bias.as_slice()])
            .collect()
    }
}

impl Mlp {
    pub fn from_layers(layers: Vec<DenseLayer>, dropout: f64, activate_last: bool) -> Result<Self> {
        let model = Self {
            layers,
            dropout,
            activate_last,
            generation: 0,
        };
        model.check()?;
        Ok(model)
    }

    /// Regression MLP `input → hidden… → output` with a linear output layer.
    pub fn new(
        input_dim: usize,
        hidden: &[usize],
        output_dim: usize,
        dropout: f64,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let dims: Vec<usize> = std::iter::once(input_dim)
            .chain(hidden.iter().copied())
            .chain(std::iter::once(output_dim))
            .collect();
        let layers = dims
            .windows(2)
            .map(|w| DenseLayer::kaiming_uniform(w[0], w[1], rng))
            .collect();
        Self::from_layers(layers, dropout, false)
    }

    /// Feature extractor `input → hidden…`, every layer activated.
    pub fn backbone(input_dim: usize, hidden: &[usize], dropout: f64, rng: &mut impl Rng) -> Result<Self> {
        if hidden.is_empty() {
            return Err(Error::Config("a backbone needs at least one hidden layer".into()));
        }
        let dims: Vec<usize> = std::iter::once(input_dim).chain(hidden.iter().copied()).collect();
        let layers = dims
            .windows(2)
            .map(|w| DenseLayer::kaiming_uniform(w[0], w[1], rng))
            .collect();
        Self::from_layers(layers, dropout, true)
    }

    /// Drops the output layer and activates the new last layer.
    pub fn into_backbone(mut self) -> Result<Self> {
        if self.activate_last {
            return Ok(self);
        }
        if self.layers.len() < 2 {
            return Err(Error::Config(
                "model has no hidden layer to use as a feature extractor".into(),
            ));
        }
        self.layers.pop();
        self.activate_last = true;
        self.generation += 1;
        Ok(self)
    }

    pub fn check(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Config("an MLP needs at least one layer".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config(format!("dropout rate {} is not in [0, 1)", self.dropout)));
        }
        for layer in &self.layers {
            layer.check()?;
        }
        for w in self.layers.windows(2) {
            if w[0].out_dim != w[1].in_dim {
                return Err(Error::shape("adjacent layer dims", w[0].out_dim, w[1].in_dim));
            }
        }
        Ok(())
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn dropout(&self) -> f64 {
        self.dropout
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(DenseLayer::n_params).sum()
    }

    fn activated(&self, layer: usize) -> bool {
        layer + 1 < self.layers.len() || self.activate_last
    }

    /// Parameter slices (weights, bias per layer). Invalidates caches.
    pub fn params_mut(&mut self) -> Vec<&mut [f64]> {
        self.generation += 1;
        self.layers
            .iter_mut()
            .flat_map(|l| l.params_mut())
            .collect()
    }

    /// Little-endian bytes of every parameter, for bit-identity checks.
    pub fn param_bytes(&self) -> Vec<u8> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.bias))
            .flat_map(|v| v.to_le_bytes())
            .collect()
    }

    pub fn forward(&self, x: &[f64], mode: Mode, rng: &mut impl Rng) -> Result<(Vec<f64>, MlpCache)> {
        if x.len() != self.input_dim() {
            return Err(Error::shape("MLP input", self.input_dim(), x.len()));
        }
        let n = self.layers.len();
        let mut cache = MlpCache {
            generation: self.generation,
            inputs: Vec::with_capacity(n),
            pre_activations: Vec::with_capacity(n),
            masks: Vec::with_capacity(n),
        };
        let mut h = x.to_vec();
        for (k, layer) in self.layers.iter().enumerate() {
            let pre = layer.forward(&h)?;
            cache.inputs.push(h);
            let mut out: Vec<f64> = if self.activated(k) {
                pre.iter().map(|&z| z.max(0.0)).collect()
            } else {
                pre.clone()
            };
            let mask = if self.activated(k) && mode == Mode::Train && self.dropout > 0.0 {
                let keep = 1.0 / (1.0 - self.dropout);
                let m: Vec<f64> = (0..out.len())
                    .map(|_| if rng.gen::<f64>() < self.dropout { 0.0 } else { keep })
                    .collect();
                out.iter_mut().zip(&m).for_each(|(o, s)| *o *= s);
                Some(m)
            } else {
                None
            };
            cache.pre_activations.push(pre);
            cache.masks.push(mask);
            h = out;
        }
        Ok((h, cache))
    }

    /// Parameter gradients and input gradient for `upstream = ∂L/∂output`.
    pub fn backward(&self, cache: &MlpCache, upstream: &[f64]) -> Result<(MlpGrads, Vec<f64>)> {
        if cache.generation != self.generation || cache.inputs.len() != self.layers.len() {
            return Err(Error::Contract(
                "forward cache does not belong to the current model parameters".into(),
            ));
        }
        if upstream.len() != self.output_dim() {
            return Err(Error::shape("upstream gradient", self.output_dim(), upstream.len()));
        }
        let mut grads = MlpGrads::zeros_like(self);
        let mut g = upstream.to_vec();
        for k in (0..self.layers.len()).rev() {
            if let Some(mask) = &cache.masks[k] {
                g.iter_mut().zip(mask).for_each(|(gi, m)| *gi *= m);
            }
            if self.activated(k) {
                g.iter_mut()
                    .zip(&cache.pre_activations[k])
                    .for_each(|(gi, &z)| {
                        if z <= 0.0 {
                            *gi = 0.0
                        }
                    });
            }
            g = self.layers[k].backward(&cache.inputs[k], &g, &mut grads.layers[k]);
        }
        Ok((grads, g))
    }
}
