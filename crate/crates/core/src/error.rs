use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("k must be positive, got {0}")]
    NonPositiveK(f64),

    #[error("x = {0} is outside the domain {1}")]
    Domain(f64, &'static str),

    #[error("digit extraction reached a negative value {0}")]
    NegativeDigitArgument(f64),

    #[error("digit does not fit in 64 bits")]
    DigitOverflow,

    #[error("digit list is empty")]
    EmptyDigits,

    #[error("need at least {needed} digits, got {got}")]
    TooFewDigits { needed: usize, got: usize },

    #[error("orbit ended at step {ended_at}; step {requested} is undefined")]
    OrbitEnded { ended_at: usize, requested: usize },

    #[error("psi is singular on the diagonal x = y")]
    Singular,

    #[error("preimage needs u > 0, got u = {0}")]
    NonPositiveU(f64),

    #[error("{0}")]
    WrongRegion(String),

    #[error("no injectivity witness: {0}")]
    NoWitness(String),

    #[error("exact mode needs rational input (num/den), got {0}")]
    NotRational(String),

    #[error("cannot parse number {0:?}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
