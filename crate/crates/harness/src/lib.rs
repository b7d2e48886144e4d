//! Configuration, batch runs and reports for the `vmp` command.

pub mod cli;
pub mod config;
pub mod report;
pub mod runner;

pub use config::{ConfigError, PlannerKind, RunConfig};
