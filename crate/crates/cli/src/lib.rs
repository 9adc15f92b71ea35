//! Library side of the `harmloop` command-line tool.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{Command, Overrides, RunConfig};
pub use error::CliError;
pub use run::{execute, Outcome, Report};
