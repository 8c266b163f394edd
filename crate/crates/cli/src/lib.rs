//! Experiment harness: configuration, analysis runs, oracle verification and
//! deterministic reports.

pub mod analyze;
pub mod config;
pub mod error;
pub mod report;
pub mod verify;

pub use analyze::analyze;
pub use config::{ExperimentConfig, Family};
pub use error::CliError;
pub use report::Report;
pub use verify::{verify, Check};
