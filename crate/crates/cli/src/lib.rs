//! Command-line front end for the non-AT certificate: configuration,
//! orchestration, reports and the on-disk cache.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::{run, Command};
pub use config::{Flags, RunConfig};
pub use error::{CliError, Outcome};
pub use report::Report;
