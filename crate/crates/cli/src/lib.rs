//! Library surface of the `qcst-lab` command: configuration validation and
//! the experiment runners, reusable from integration tests.

pub mod config;
pub mod experiments;

pub use config::{validate_config, ExperimentConfig, ExperimentId};
pub use experiments::{derive_seed, run_experiment, write_outputs, ExperimentResult};
