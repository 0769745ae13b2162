//! Experiment driver: configuration, the sweep presets and CSV output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{cmd_analyze, cmd_crowd_sweep, cmd_gap_sweep, cmd_lower_bound, cmd_run};
pub use config::{ExperimentConfig, FileConfig, Overrides};
pub use error::CliError;
