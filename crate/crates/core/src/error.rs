use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("matrix is numerically singular (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error(
        "position book (M={m}, D={d}, q={q}, C={c}) does not fit the window; \
         largest feasible branch count is {max_c}"
    )]
    InfeasibleBook {
        m: usize,
        d: usize,
        q: usize,
        c: usize,
        max_c: usize,
    },

    #[error("symbol index {index} needs neighbours outside the stream [{first}, {last}]")]
    MissingSymbols { index: i64, first: i64, last: i64 },

    #[error("unknown algorithm tag `{0}`")]
    UnknownAlgorithm(String),

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("trial {trial} (seed {seed}) failed: {source}")]
    Trial {
        trial: u64,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::Dimension { what, expected, got })
        }
    }
}
