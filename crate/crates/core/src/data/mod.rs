//! Dataset ingestion, scaffold-stratified folds, and regression metrics.

mod dataset;
mod metrics;
mod split;

pub use dataset::{featurize_smiles, Dataset, DatasetSummary, Row};
pub use metrics::{
    mae, r2, relative_performance, relative_performance_csv, FoldMetrics, MetricsReport,
    RelativePerformance, RelativeRow,
};
pub use split::{stratified_kfold, FoldSplit, N_QUANTILES};
