//! Batch front end: reads an experiment configuration, runs one command and
//! writes its rows as CSV or JSON lines.
//!
//! Exit statuses: 0 success, 1 invalid input, 2 solver error, 3 failed
//! certification.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, Failure, Written};
pub use config::{Args, Command, ExperimentConfig, Format, OUT_DIR_ENV};
pub use output::{Row, COLUMNS};
