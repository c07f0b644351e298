//! Command-line front end: configuration loading, spectrum ingestion and
//! deterministic CSV/JSON output for the `gse` binary.

pub mod args;
pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod table;
pub mod units;

pub use clap;
pub use error::{CliError, Result};
