//! Sampling runs, verification suites and scaling experiments.

pub mod commands;
pub mod config;

pub use commands::{run_experiment, run_sample, run_verify, VerifyOutcome};
pub use config::{ExperimentConfig, Fault, ModelSpec, RhoRule, Statistic};
