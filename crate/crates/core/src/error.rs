use thiserror::Error;

/// Errors raised by every layer of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("total dimension {dim} exceeds the configured maximum {max}")]
    Size { dim: usize, max: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("trace is {trace:.12}, expected 1")]
    Normalization { trace: f64 },

    #[error("minimum eigenvalue {min_eigenvalue:.3e} is below -1e-10")]
    Positivity { min_eigenvalue: f64 },

    #[error("Bloch vector has length {norm:.12} > 1")]
    BlochBall { norm: f64 },

    #[error("correlation matrix invariant violated: {0}")]
    Correlation(String),

    #[error("Kraus operators are not trace preserving (max deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("schedule does not cover [{from}, {to}]")]
    ScheduleCoverage { from: f64, to: f64 },

    #[error("invalid schedule: {0}")]
    Schedule(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
