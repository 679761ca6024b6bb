//! Command line front end for wavelet-guided model selection: CSV and TOML
//! input, JSON reports, CSV tables and a parallel Monte Carlo runner.

pub mod candidates;
pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod report;
pub mod runner;
pub mod tables;

pub use error::{CliError, CliResult, ExitCode};
