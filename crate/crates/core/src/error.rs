use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("invalid time of day {hours:02}:{minutes:02}:{seconds:02}")]
    InvalidTime {
        hours: u32,
        minutes: u32,
        seconds: u32,
    },

    #[error("date {date} precedes the start date {start}")]
    DateBeforeStart {
        date: chrono::NaiveDate,
        start: chrono::NaiveDate,
    },

    #[error("cannot extract features from an empty frame")]
    EmptyFrame,

    #[error("frame mixes records from {first} and {other}")]
    MixedDates {
        first: chrono::NaiveDate,
        other: chrono::NaiveDate,
    },

    #[error("records are not in chronological order at index {index}")]
    NotChronological { index: usize },

    #[error("no transactions survived preprocessing")]
    NoTransactions,

    #[error("invalid database: {0}")]
    InvalidDatabase(String),

    #[error("genotype has length {actual}, expected {expected}")]
    GenotypeLength { expected: usize, actual: usize },

    #[error("genotype element {index} = {value} lies outside [0, 1]")]
    GenotypeRange { index: usize, value: f64 },

    #[error("stochastic threshold mode requires a random number generator")]
    MissingRng,
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
