//! Command-line layer for `relbell`: flag parsing, config files and output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod config_file;
pub mod run;

pub use args::{parse_args, render, Invocation, RunConfig};
pub use run::execute;

/// Exit code for malformed invocations.
pub const EXIT_USAGE: i32 = 1;
/// Exit code for failures while computing or writing results.
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error(transparent)]
    Compute(#[from] relbell::Error),
    #[error("cannot write {}: {source}", path.display())]
    Write { path: std::path::PathBuf, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Clap(e) if !e.use_stderr() => 0,
            CliError::Clap(_) => EXIT_USAGE,
            CliError::Compute(_) | CliError::Write { .. } | CliError::Io(_) | CliError::Json(_) => EXIT_RUNTIME,
        }
    }
}
