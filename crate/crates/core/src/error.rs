use thiserror::Error;

/// Errors raised by the core numerical routines.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Dimensions of the supplied arrays do not match what the operation needs.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A constructor was handed data violating a type invariant.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The reference data has zero norm, so a relative error is undefined.
    #[error("reference data has zero norm; relative error undefined")]
    ZeroNormReference,

    /// A variable block has no spread, so the requested scaling factor would be zero.
    #[error("degenerate variable {index}: {reason}")]
    DegenerateVariable { index: usize, reason: String },

    /// The underlying eigen/SVD solver failed to converge.
    #[error("eigen-solver failed to converge: {0}")]
    SolverConvergence(String),

    /// An unfolding (or matrix) is numerically rank zero.
    #[error("rank-zero input along {0}")]
    RankZero(String),

    /// The Koopman eigenproblem is defective or too ill-conditioned to trust.
    #[error("defective eigenproblem: {0}")]
    DefectiveEigenproblem(String),

    /// Mode filtering removed every mode.
    #[error("no modes pass the growth-rate filter |delta| < {threshold}; nearest growth rates: {nearest:?}")]
    EmptyModeSet { threshold: f64, nearest: Vec<f64> },

    /// The imaginary residue of a nominally real reconstruction is too large.
    #[error("imaginary residue {residue:.3e} exceeds {limit:.3e} of the field norm")]
    ImaginaryResidue { residue: f64, limit: f64 },

    /// Every entry of the input is flagged as a gap.
    #[error("all entries are gaps; nothing to anchor the reconstruction")]
    AllGaps,
}
