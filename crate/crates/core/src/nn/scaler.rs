use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Affine map of targets onto `[0, 1]` using training-fold extremes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub y_min: f64,
    pub y_max: f64,
}

impl MinMaxScaler {
    pub fn fit(y: &[f64]) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::Config("cannot fit a scaler on no targets".into()));
        }
        if let Some(bad) = y.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("target {bad} is not finite")));
        }
        let (lo, hi) = y
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if hi <= lo {
            return Err(Error::Config(format!(
                "targets span [{lo}, {hi}]; min-max scaling needs y_max > y_min"
            )));
        }
        Ok(Self { y_min: lo, y_max: hi })
    }

    pub fn scale(&self, y: f64) -> f64 {
        (y - self.y_min) / (self.y_max - self.y_min)
    }

    pub fn inverse(&self, s: f64) -> f64 {
        s * (self.y_max - self.y_min) + self.y_min
    }

    pub fn scale_all(&self, y: &[f64]) -> Vec<f64> {
        y.iter().map(|&v| self.scale(v)).collect()
    }

    pub fn inverse_all(&self, s: &[f64]) -> Vec<f64> {
        s.iter().map(|&v| self.inverse(v)).collect()
    }
}
