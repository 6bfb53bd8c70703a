use thiserror::Error;

/// Errors raised by the hybrid ROM applications.
#[derive(Debug, Error)]
pub enum HybridError {
    #[error(transparent)]
    Core(#[from] romkit_core::CoreError),

    #[error(transparent)]
    Nn(#[from] romkit_nn::NnError),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("not enough snapshots: {0}")]
    InsufficientSnapshots(String),
}

pub type Result<T> = std::result::Result<T, HybridError>;
