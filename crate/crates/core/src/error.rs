use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown rule `{0}`")]
    UnknownRule(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed record in {path} line {line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("no rule has at least {min_examples} violations; lower the minimum example count")]
    NoEligibleRules { min_examples: usize },

    #[error("cannot sample {category}: need {needed} instance(s), {available} available")]
    InsufficientInstances {
        category: String,
        needed: usize,
        available: usize,
    },

    #[error("training set must contain both labels")]
    SingleLabel,

    #[error("repetition {index}")]
    Repetition {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
