//! Feed-forward regression network trained with Adam on min-max scaled targets.

mod adam;
mod layer;
mod mlp;
mod scaler;
mod train;

pub use adam::{Adam, AdamConfig};
pub use layer::{DenseLayer, LayerGrad};
pub use mlp::{Mlp, MlpCache, MlpGrads, Mode};
pub use scaler::MinMaxScaler;
pub(crate) use train::{check_xy, eval_rng};
pub use train::{
    hyperparameter_grid, predict, train_mlp, MlpCheckpoint, TrainConfig, TrainedMlp,
    CHECKPOINT_VERSION, DROPOUT_GRID, HIDDEN_LAYER_GRID, MLP_CHECKPOINT_FORMAT,
};
