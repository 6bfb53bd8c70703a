//! CLI error classes mapped to exit codes: configuration/usage problems exit
//! with 2, numerical failures with 3, malformed input files with 4.

use romkit_core::CoreError;
use romkit_hybrid::HybridError;
use romkit_nn::NnError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("malformed input file: {0}")]
    MalformedFile(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::MalformedFile(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::SolverConvergence(_)
            | CoreError::RankZero(_)
            | CoreError::DefectiveEigenproblem(_)
            | CoreError::EmptyModeSet { .. }
            | CoreError::ImaginaryResidue { .. }
            | CoreError::ZeroNormReference
            | CoreError::AllGaps => CliError::Numerical(e.to_string()),
            CoreError::ShapeMismatch(_)
            | CoreError::InvalidArgument(_)
            | CoreError::DegenerateVariable { .. } => CliError::Config(e.to_string()),
        }
    }
}

impl From<NnError> for CliError {
    fn from(e: NnError) -> Self {
        match e {
            NnError::NanLoss { .. } => CliError::Numerical(e.to_string()),
            NnError::MalformedCheckpoint(_) => CliError::MalformedFile(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<HybridError> for CliError {
    fn from(e: HybridError) -> Self {
        match e {
            HybridError::Core(c) => c.into(),
            HybridError::Nn(n) => n.into(),
            HybridError::InvalidConfig(m) => CliError::Config(m),
            HybridError::InsufficientSnapshots(m) => CliError::Config(m),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("io: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("config json: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
