use std::io;
use std::path::PathBuf;

/// Process exit status for a finished run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Inconclusive,
    /// A falsification event or an internal-consistency failure.
    Failure,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Inconclusive => 1,
            Outcome::Failure => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::Inconclusive => "inconclusive",
            Outcome::Failure => "failure",
        }
    }
}

pub const USAGE_EXIT: i32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid {field}: {message}")]
    Usage { field: &'static str, message: String },
    #[error("cache file {path}: {message}")]
    Cache { path: PathBuf, message: String },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Core(#[from] nonat_core::Error),
}

impl CliError {
    pub fn usage(field: &'static str, message: String) -> Self {
        CliError::Usage { field, message }
    }

    pub fn io(context: impl Into<String>, source: io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => USAGE_EXIT,
            _ => Outcome::Failure.code(),
        }
    }
}
