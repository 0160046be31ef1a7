//! JSON artifacts written by the commands.

use std::path::Path;

use hqnn_core::data::MetricsReport;
use hqnn_core::{Error, Result};
use serde::{Deserialize, Serialize};

pub const METRICS_FORMAT: &str = "hqnn-metrics";
pub const METRICS_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub checkpoint: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backbone_hash_before: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backbone_hash_after: Option<String>,
}

/// Metrics of one command run over all folds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub format: String,
    pub version: u32,
    pub command: String,
    pub task: String,
    pub seed: u64,
    pub noise: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_qubits: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantum_params: Option<usize>,
    pub trainable_params: usize,
    pub report: MetricsReport,
    pub folds: Vec<FoldRecord>,
}

/// Accepts a full run record or a bare report (e.g. means copied from a
/// published table).
pub fn load_report(path: &Path) -> Result<MetricsReport> {
    let text = std::fs::read_to_string(path)?;
    if let Ok(run) = serde_json::from_str::<RunMetrics>(&text) {
        return Ok(run.report);
    }
    serde_json::from_str::<MetricsReport>(&text).map_err(|e| Error::Config(format!(
        "{} is neither a metrics run nor a metrics report: {e}",
        path.display()
    )))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn hash_bytes(bytes: &[u8]) -> String {
    format!("{:016x}", xxhash_rust::xxh3::xxh3_64(bytes))
}
