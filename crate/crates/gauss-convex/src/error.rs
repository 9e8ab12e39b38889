use thiserror::Error;

/// Errors produced by construction and estimation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("hermite degree {0} above the supported guard (60)")]
    UnsupportedDegree(u32),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("direction must be a unit vector (norm {0} differs from 1 by more than 1e-9)")]
    NonUnitVector(f64),

    #[error("zero vector cannot define a direction")]
    ZeroVector,

    #[error("matrix is not orthogonal within 1e-9")]
    NotOrthogonal,

    #[error("body does not contain the origin")]
    EmptyBody,

    #[error("sampling plan must request at least one sample")]
    ZeroSamples,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigensolver did not converge after {0} sweeps")]
    EigenNoConvergence(usize),

    #[error("body spec parse error at line {line}, column {column}: {message}")]
    SpecParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::SpecParse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
