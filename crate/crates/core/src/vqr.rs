//! Variational quantum regressor.
//!
//! An embedding `e ∈ ℝⁿ` is encoded as Ry angles `θ_i = arctan(e_i) + π/2`,
//! evolved through the ansatz and decoded as the sum of Pauli-Z expectations.
//! Gradients use the two-point parameter-shift rule, which is exact for Ry
//! generators and remains exact under the linear noise channels of
//! [`NoiseModel`].

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::noise::NoiseModel;
use crate::quantum::CircuitTemplate;
use crate::{Error, Result};

/// Maps each embedding coordinate into `(0, π)`, strictly increasing.
pub fn encode(embedding: &[f64]) -> Result<Vec<f64>> {
    embedding
        .iter()
        .map(|&e| {
            if e.is_finite() {
                Ok(e.atan() + FRAC_PI_2)
            } else {
                Err(Error::Domain(format!("embedding value {e} is not finite")))
            }
        })
        .collect()
}

/// Trainable ansatz angles, block-major (`block · n + qubit`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VqrParams(pub Vec<f64>);

impl VqrParams {
    pub fn zeros(template: &CircuitTemplate) -> Self {
        Self(vec![0.0; template.n_params()])
    }

    /// Uniform in `[0, 2π)`.
    pub fn random(template: &CircuitTemplate, rng: &mut impl Rng) -> Self {
        Self(
            (0..template.n_params())
                .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn check(&self, template: &CircuitTemplate) -> Result<()> {
        if self.0.len() != template.n_params() {
            return Err(Error::shape("ansatz parameters", template.n_params(), self.0.len()));
        }
        if let Some(bad) = self.0.iter().find(|p| !p.is_finite()) {
            return Err(Error::Domain(format!("ansatz parameter {bad} is not finite")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqrGradient {
    /// `∂E/∂θ_j` for every ansatz parameter.
    pub d_params: Vec<f64>,
    /// `∂E/∂e_i` through the arctan encoder.
    pub d_inputs: Vec<f64>,
}

/// How circuit expectations are evaluated.
#[derive(Clone, Debug, Default)]
pub enum Backend {
    #[default]
    Exact,
    Noisy(Box<NoiseModel>),
}

impl Backend {
    pub fn noisy(model: NoiseModel) -> Self {
        Backend::Noisy(Box::new(model))
    }

    pub fn expectation(
        &self,
        template: &CircuitTemplate,
        encoding: &[f64],
        params: &[f64],
    ) -> Result<f64> {
        match self {
            Backend::Exact => template.run(encoding, params),
            Backend::Noisy(model) => model.run(template, encoding, params),
        }
    }
}

fn check_embedding(template: &CircuitTemplate, embedding: &[f64]) -> Result<()> {
    if embedding.len() != template.n_qubits() {
        return Err(Error::shape("embedding", template.n_qubits(), embedding.len()));
    }
    Ok(())
}

pub fn vqr_forward(
    embedding: &[f64],
    params: &VqrParams,
    template: &CircuitTemplate,
    backend: &Backend,
) -> Result<f64> {
    check_embedding(template, embedding)?;
    params.check(template)?;
    backend.expectation(template, &encode(embedding)?, &params.0)
}

/// Expectation and its parameter-shift gradient.
pub fn value_and_grad(
    embedding: &[f64],
    params: &VqrParams,
    template: &CircuitTemplate,
    backend: &Backend,
) -> Result<(f64, VqrGradient)> {
    check_embedding(template, embedding)?;
    params.check(template)?;
    let mut angles = encode(embedding)?;
    let mut theta = params.0.clone();
    let eval = |a: &[f64], t: &[f64]| backend.expectation(template, a, t);

    let value = eval(&angles, &theta)?;

    let mut d_params = Vec::with_capacity(theta.len());
    for j in 0..theta.len() {
        let orig = theta[j];
        theta[j] = orig + FRAC_PI_2;
        let plus = eval(&angles, &theta)?;
        theta[j] = orig - FRAC_PI_2;
        let minus = eval(&angles, &theta)?;
        theta[j] = orig;
        d_params.push((plus - minus) / 2.0);
    }

    let mut d_inputs = Vec::with_capacity(angles.len());
    for i in 0..angles.len() {
        let orig = angles[i];
        angles[i] = orig + FRAC_PI_2;
        let plus = eval(&angles, &theta)?;
        angles[i] = orig - FRAC_PI_2;
        let minus = eval(&angles, &theta)?;
        angles[i] = orig;
        let e = embedding[i];
        d_inputs.push((plus - minus) / 2.0 / (1.0 + e * e));
    }
    Ok((value, VqrGradient { d_params, d_inputs }))
}

pub fn param_shift_grad(
    embedding: &[f64],
    params: &VqrParams,
    template: &CircuitTemplate,
    backend: &Backend,
) -> Result<VqrGradient> {
    value_and_grad(embedding, params, template, backend).map(|(_, g)| g)
}
