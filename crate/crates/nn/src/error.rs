use thiserror::Error;

/// Errors raised by the neural engine.
#[derive(Debug, Error)]
pub enum NnError {
    /// Layer shapes do not compose; the message names the offending layer.
    #[error("layer {layer} ({kind}): {reason}")]
    ShapeMismatch {
        layer: usize,
        kind: String,
        reason: String,
    },

    #[error("invalid network spec: {0}")]
    InvalidSpec(String),

    #[error("invalid training options: {0}")]
    InvalidOptions(String),

    /// A split block cannot hold a single rolling window.
    #[error("{block} block of {len} snapshots cannot hold a window of q={q} plus p={p}")]
    BlockTooSmall {
        block: &'static str,
        len: usize,
        q: usize,
        p: usize,
    },

    /// Training loss left the finite range.
    #[error("loss became non-finite at epoch {epoch}; last finite epoch was {last_finite:?}")]
    NanLoss {
        epoch: usize,
        last_finite: Option<usize>,
    },

    #[error("malformed checkpoint: {0}")]
    MalformedCheckpoint(String),
}

pub type Result<T> = std::result::Result<T, NnError>;
