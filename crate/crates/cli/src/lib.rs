//! Experiment runner: TOML configs in, JSON reports, CSV tables and binary
//! fields out.

pub mod config;
pub mod report;
pub mod run;

pub use config::{ConfigError, ExperimentConfig};
pub use run::{run, Command, Outcome, RunError};
