//! Experiment runner around `grassmann-core`: configuration, the
//! generate/POD/interpolate/evaluate pipeline, an on-disk artifact cache and
//! report tables.

pub mod cache;
pub mod commands;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod samples;

pub use config::{ExperimentConfig, MethodChoice};
pub use error::{CliError, CliResult, Stage};
pub use pipeline::run_pipeline;
pub use report::{ErrorReport, MethodReport};
