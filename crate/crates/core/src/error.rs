use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation (e.g. `mobius(0)`).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("incompatible exponents: leads {0} and {1} do not differ by an integer")]
    IncompatibleExponent(String, String),

    #[error("series is not invertible: leading coefficient is zero")]
    NonInvertible,

    /// More precision was requested than the series holds.
    #[error("insufficient precision: requested order {requested}, available {available}")]
    InsufficientPrecision { requested: i64, available: i64 },

    #[error("fractional exponent: {0}")]
    FractionalExponent(String),

    #[error("normalization error: {0}")]
    Normalization(String),

    #[error("level-1 unsupported by the f_theta formula (requires N >= 2)")]
    UnsupportedLevel,

    #[error("invalid form spec: {0}")]
    Spec(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
