//! Library surface of the ROM toolkit CLI: binary tensor files, JSON run
//! configurations, the synthetic ground-truth generator and the command
//! implementations. The `romkit` binary is a thin argument-parsing shell
//! around this crate.

pub mod commands;
pub mod config;
mod error;
pub mod format;
pub mod plots;
pub mod report;
pub mod synthetic;

pub use error::{CliError, Result};
pub use format::TensorFile;
