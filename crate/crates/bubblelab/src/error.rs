use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Solver(bubblelab_core::Error),
    #[error("{0}")]
    Residual(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    /// A failed sweep cell, keeping the category of the underlying error.
    #[error("{cell}: {message}")]
    Cell {
        cell: String,
        category: &'static str,
        code: i32,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Solver(_) => "solver",
            CliError::Residual(_) => "residual",
            CliError::Io { .. } | CliError::Csv(_) => "io",
            CliError::Cell { category, .. } => category,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } | CliError::Csv(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Residual(_) => 4,
            CliError::Cell { code, .. } => *code,
        }
    }

    pub fn in_cell(&self, cell: &str) -> Self {
        CliError::Cell {
            cell: cell.to_string(),
            category: self.category(),
            code: self.exit_code(),
            message: self.to_string(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<bubblelab_core::Error> for CliError {
    /// Invalid inputs and violated model hypotheses are configuration
    /// problems; everything else is a solver failure.
    fn from(e: bubblelab_core::Error) -> Self {
        use bubblelab_core::Error as E;
        match e {
            E::Domain { .. } | E::Hypothesis(_) | E::Length { .. } => CliError::Config(e.to_string()),
            other => CliError::Solver(other),
        }
    }
}
