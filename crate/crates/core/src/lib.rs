//! Hybrid quantum-classical regression for molecular property prediction.
//!
//! The crate is organised bottom-up:
//!
//! - [`quantum`]: exact statevector simulation of the Ry/CNOT gate set and the
//!   encoder/ansatz circuit template, read out as a sum of Pauli-Z expectations.
//! - [`noise`]: density-matrix evolution under Kraus channels built from
//!   hardware calibration figures (depolarizing, amplitude and phase damping,
//!   readout error).
//! - [`vqr`]: the variational quantum regressor (arctan angle encoding,
//!   ansatz, Z-sum decoder) with parameter-shift gradients.
//! - [`nn`]: a small feed-forward MLP with ReLU, inverted dropout, Adam and
//!   min-max target scaling.
//! - [`hybrid`]: MLP backbone + projection + quantum head, trained under the
//!   scratch / finetune / frozen strategies.
//! - [`chem`]: SMILES parsing, hashed circular fingerprints and approximate
//!   Murcko scaffolds.
//! - [`data`]: CSV ingestion, scaffold-stratified k-fold splits, R²/MAE
//!   metrics and relative-performance reporting.

pub mod chem;
pub mod data;
pub mod error;
pub mod hybrid;
pub mod noise;
pub mod nn;
pub mod quantum;
pub mod rng;
pub mod vqr;

pub use error::{Error, Result};
