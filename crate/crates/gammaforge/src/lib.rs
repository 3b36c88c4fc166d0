//! Spec files, report formats and the `gammaforge` subcommands on top of
//! `gammaforge-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod files;
pub mod format;
pub mod report;

pub use config::{Cli, Command, Options, SignChoice};
pub use error::{exit, CliError};
