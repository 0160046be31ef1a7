use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn check_pair(y_true: &[f64], y_pred: &[f64]) -> Result<()> {
    if y_true.is_empty() {
        return Err(Error::Metric("no samples".into()));
    }
    if y_true.len() != y_pred.len() {
        return Err(Error::shape("predictions", y_true.len(), y_pred.len()));
    }
    Ok(())
}

/// Coefficient of determination. Undefined for a constant `y_true`.
pub fn r2(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_pair(y_true, y_pred)?;
    let mean = y_true.iter().sum::<f64>() / y_true.len() as f64;
    let ss_tot: f64 = y_true.iter().map(|y| (y - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::Metric("R² is undefined for constant targets".into()));
    }
    let ss_res: f64 = y_true.iter().zip(y_pred).map(|(y, p)| (y - p).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

pub fn mae(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_pair(y_true, y_pred)?;
    Ok(y_true.iter().zip(y_pred).map(|(y, p)| (y - p).abs()).sum::<f64>() / y_true.len() as f64)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub train_r2: f64,
    pub train_mae: f64,
    pub test_r2: f64,
    pub test_mae: f64,
}

impl FoldMetrics {
    fn to_array(self) -> [f64; 4] {
        [self.train_r2, self.train_mae, self.test_r2, self.test_mae]
    }

    fn from_array(a: [f64; 4]) -> Self {
        Self {
            train_r2: a[0],
            train_mae: a[1],
            test_r2: a[2],
            test_mae: a[3],
        }
    }
}

/// Per-fold metrics with their mean and sample (n−1) standard deviation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub label: String,
    pub per_fold: Vec<FoldMetrics>,
    pub mean: FoldMetrics,
    pub std: FoldMetrics,
}

impl MetricsReport {
    /// A single fold gets a zero std.
    pub fn from_folds(label: impl Into<String>, per_fold: Vec<FoldMetrics>) -> Result<Self> {
        if per_fold.is_empty() {
            return Err(Error::Metric("report needs at least one fold".into()));
        }
        let n = per_fold.len() as f64;
        let mut mean = [0.0; 4];
        for f in &per_fold {
            for (m, v) in mean.iter_mut().zip(f.to_array()) {
                *m += v / n;
            }
        }
        let mut std = [0.0; 4];
        if per_fold.len() > 1 {
            for f in &per_fold {
                for ((s, v), m) in std.iter_mut().zip(f.to_array()).zip(mean) {
                    *s += (v - m).powi(2);
                }
            }
            for s in &mut std {
                *s = (*s / (n - 1.0)).sqrt();
            }
        }
        Ok(Self {
            label: label.into(),
            per_fold,
            mean: FoldMetrics::from_array(mean),
            std: FoldMetrics::from_array(std),
        })
    }

    /// Report known only by its summary statistics.
    pub fn from_summary(label: impl Into<String>, mean: FoldMetrics, std: FoldMetrics) -> Self {
        Self {
            label: label.into(),
            per_fold: Vec::new(),
            mean,
            std,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Test-set change of a hybrid model relative to the classical baseline, in
/// percent. Positive is better for both: higher R², lower MAE.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativePerformance {
    pub r2_pct: f64,
    pub mae_pct: f64,
}

pub fn relative_performance(
    classical: &MetricsReport,
    hqnn: &MetricsReport,
) -> Result<RelativePerformance> {
    if classical.per_fold.len() != hqnn.per_fold.len() {
        return Err(Error::Metric(format!(
            "reports cover different folds ({} vs {})",
            classical.per_fold.len(),
            hqnn.per_fold.len()
        )));
    }
    let (c, h) = (classical.mean, hqnn.mean);
    if c.test_r2 == 0.0 || c.test_mae == 0.0 {
        return Err(Error::Metric("classical baseline metric is zero".into()));
    }
    Ok(RelativePerformance {
        r2_pct: (h.test_r2 - c.test_r2) / c.test_r2 * 100.0,
        mae_pct: (c.test_mae - h.test_mae) / c.test_mae * 100.0,
    })
}

/// One table row: a property/baseline pair and the relative performance of
/// each hybrid configuration, keyed by its column label (e.g. `HQFi (4Q)`).
#[derive(Clone, Debug, PartialEq)]
pub struct RelativeRow {
    pub property: String,
    pub model: String,
    pub entries: Vec<(String, RelativePerformance)>,
}

/// Wide CSV: `property,model,<label> R2,<label> MAE,...`, two decimals.
/// Column labels come from the first row; every row must match them.
pub fn relative_performance_csv(rows: &[RelativeRow]) -> Result<String> {
    let labels: Vec<&str> = rows
        .first()
        .map(|r| r.entries.iter().map(|(l, _)| l.as_str()).collect())
        .unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["property".to_string(), "model".to_string()];
    for l in &labels {
        header.push(format!("{l} R2"));
        header.push(format!("{l} MAE"));
    }
    w.write_record(&header).map_err(csv_err)?;
    for row in rows {
        let row_labels: Vec<&str> = row.entries.iter().map(|(l, _)| l.as_str()).collect();
        if row_labels != labels {
            return Err(Error::Metric(format!(
                "row `{}` has columns {row_labels:?}, expected {labels:?}",
                row.property
            )));
        }
        let mut rec = vec![row.property.clone(), row.model.clone()];
        for (_, p) in &row.entries {
            rec.push(format!("{:.2}", p.r2_pct));
            rec.push(format!("{:.2}", p.mae_pct));
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Metric(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Metric(e.to_string())
}
