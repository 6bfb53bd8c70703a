//! Minimal neural engine for the snapshot ROM toolkit.
//!
//! Dense, 1-D convolution and LSTM layers with exact analytic
//! backpropagation, Adam optimisation, early stopping and rolling-window
//! supervision. Everything runs in `f64` on the CPU; a seed fully determines
//! initialisation and shuffling, so training is bit-reproducible.

pub mod checkpoint;
mod error;
pub mod feature;
pub mod loss;
pub mod network;
pub mod spec;
pub mod train;
pub mod windows;

pub use error::{NnError, Result};
pub use feature::Feature;
pub use network::Network;
pub use spec::{Activation, LayerSpec, Loss, NetworkSpec};
pub use train::{train, EpochStats, TrainOptions, TrainedModel};
pub use windows::{make_windows, RollingWindowDataset, Split, Window};
