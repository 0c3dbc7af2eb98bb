//! File formats, the parallel simulation runner and the command
//! implementations behind the `tailcr` binary.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod report;
pub mod runner;

pub use error::{CliError, CliResult};
