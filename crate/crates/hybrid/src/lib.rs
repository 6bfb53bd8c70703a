//! Hybrid reduced order models: the applications that pair the modal
//! decompositions with the neural engine.
//!
//! * [`ae`] — autoencoder pattern identification with latent-unit ranking.
//! * [`forecast`] — SVD+CNN/RNN forecasting ROMs (and the fully neural
//!   variant operating on raw snapshots).
//! * [`reconstruct`] — full-field reconstruction from stride-sampled sensors
//!   via two parallel decoder stacks joined by a bilinear head.

pub mod ae;
mod error;
pub mod forecast;
pub mod reconstruct;

pub use ae::{ae_identify_patterns, AeConfig, AeOutcome};
pub use error::{HybridError, Result};
pub use forecast::{
    forecast_rom, forecast_rom_with_predictor, ForecastOutcome, ForecastRomConfig, Framework,
    ModelKind, Predictor, ScalingStep,
};
pub use reconstruct::{
    downsample, reconstruct_from_sensors, ReconstructionConfig, ReconstructionOutcome,
};
