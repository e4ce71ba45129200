use thiserror::Error;

/// Errors raised by matrix construction, the eigen oracle, the map catalog and
/// the bound estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix dimension must be at least {min} (got {n})")]
    TooSmall { n: usize, min: usize },

    #[error("matrix dimension {n} exceeds the supported maximum {max}")]
    TooLarge { n: usize, max: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not normal (defect {defect:e})")]
    NotNormal { defect: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("spectrum is not real")]
    ComplexSpectrum,

    #[error("{solver} did not converge after {iterations} iterations")]
    NoConvergence {
        solver: &'static str,
        iterations: usize,
    },

    #[error("{solver} residual certificate {residual:e} exceeds {limit:e}")]
    Certificate {
        solver: &'static str,
        residual: f64,
        limit: f64,
    },

    #[error("spectral interval [{m}, {big_m}] does not contain the spectrum [{lo}, {hi}]")]
    Interval { m: f64, big_m: f64, lo: f64, hi: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors that signal an unmet mathematical precondition (class,
    /// size) rather than malformed input or a numerical failure.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian { .. }
                | Error::NotNormal { .. }
                | Error::NotPositiveDefinite { .. }
                | Error::NotPositiveSemidefinite { .. }
                | Error::TooSmall { .. }
                | Error::ComplexSpectrum
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
