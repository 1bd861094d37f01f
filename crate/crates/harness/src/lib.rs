//! Experiment harness for the Gaussian principal frequency: TOML
//! configuration, body literals, experiment runners and JSON / CSV reports.
//! The numerics live in `ou-brunn-core`.

pub mod config;
pub mod experiments;
pub mod literal;
pub mod report;

pub use config::{Config, ConfigError};
pub use experiments::{execute, Experiment, Outcome};
pub use report::{CaseRecord, Report};
