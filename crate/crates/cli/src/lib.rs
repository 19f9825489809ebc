//! Command-line front end for the `qplex` library.

pub mod args;
pub mod commands;
pub mod document;
pub mod report;

pub use commands::{dispatch, CliError, Outcome};
