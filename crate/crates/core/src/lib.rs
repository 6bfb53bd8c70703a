//! Core numerical engine for snapshot-based reduced order modelling.
//!
//! A database sampled at `K` time instants is held either as a [`SnapshotMatrix`]
//! (space flattened to a single index, one column per snapshot) or as a
//! [`SnapshotTensor`] (components and spatial axes kept separate, time last).
//! On top of that data model the crate provides:
//!
//! * truncated SVD/POD and Tucker (HOSVD) factorisations with tolerance-driven
//!   rank selection ([`decompose`]),
//! * iterative gappy SVD/HOSVD repair of corrupted entries and SVD-based
//!   resolution doubling ([`repair`]),
//! * high-order dynamic mode decomposition with time-delayed snapshots,
//!   its multidimensional/iterative variants and DMD extrapolation ([`hodmd`]),
//! * per-variable centering/scaling transforms and the RRMSE quality metric
//!   ([`scaling`], [`metrics`]).
//!
//! All arithmetic is `f64`; every operation is a pure function over immutable
//! inputs and deterministic given its arguments.

pub mod decompose;
mod error;
pub mod hodmd;
pub mod linalg;
pub mod metrics;
pub mod repair;
pub mod rng;
pub mod scaling;
pub mod tensor;

pub use error::CoreError;
pub use tensor::{GapMask, NdArray, SnapshotMatrix, SnapshotTensor};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, CoreError>;
