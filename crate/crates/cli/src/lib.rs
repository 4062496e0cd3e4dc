//! Config-driven experiments over constrained polynomial families.

pub mod config;
pub mod experiment;
pub mod format;

pub use config::{parse_config, ConfigError, ExperimentConfig};
pub use experiment::{execute, run_experiment, seed_check, ExperimentReport, Outputs, ReportRow, RunError, RunOptions};
