//! Library side of the `chainscope` binary: config, system file format,
//! builders and commands.

pub mod builders;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;

pub use commands::{render, run, Output};
pub use config::RunConfig;
pub use error::{CliError, Result};
