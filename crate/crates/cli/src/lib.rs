//! Command-line front end: configuration files, scenario presets, sweeps,
//! CSV output with manifests and plot scripts.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod plotscript;

pub use error::{CliError, CliResult};
