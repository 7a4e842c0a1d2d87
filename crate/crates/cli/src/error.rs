use std::path::PathBuf;

use thiserror::Error;

/// Failures of a CLI run, split by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or incomplete configuration (exit 2).
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Missing(String),
    #[error("{0}")]
    Core(pairpath::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
}

impl CliError {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        CliError::Parse { line, msg: msg.into() }
    }

    /// 2 for configuration problems, 1 for everything that fails later.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Missing(_) | CliError::Core(pairpath::Error::Parse { .. }) => 2,
            _ => 1,
        }
    }
}

impl From<pairpath::Error> for CliError {
    fn from(e: pairpath::Error) -> Self {
        CliError::Core(e)
    }
}
