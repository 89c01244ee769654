//! Command-line front end: configuration, report files and the pipelines
//! behind each `restrictlab` subcommand.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{CmdError, CmdResult, Outcome, Status, VerdictReport, VerifyRun};
pub use config::ExperimentConfig;
