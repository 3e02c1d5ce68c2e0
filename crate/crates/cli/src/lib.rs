//! Command-line front end for `stadion`: argument parsing, the parallel scan
//! engine and the JSON/CSV writers.

pub mod args;
mod commands;
pub mod format;
pub mod scan;

use std::io::Write;

use thiserror::Error;

pub use args::{Cli, Command};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] stadion::Error),
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Usage(_) => "usage",
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => "io",
            CliError::Pool(_) => "pool",
        }
    }

    /// Process exit status: 2 for bad arguments, 1 otherwise.
    pub fn exit_status(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// One-line JSON description for standard error.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.code(), "message": self.to_string() }).to_string()
    }
}

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

/// Runs a parsed command and writes its document to `--out` or standard output.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let bytes = render(cli)?;
    match &cli.common.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// The output document of a command.
pub fn render(cli: &Cli) -> Result<Vec<u8>, CliError> {
    let tol = cli.common.tol.resolve();
    let pool = scan::pool(cli.common.workers)?;
    commands::dispatch(&cli.command, &tol, &pool)
}
