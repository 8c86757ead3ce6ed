use thiserror::Error;

/// Errors raised by the spectral engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    /// The requested tail tolerance could not be reached below the configured cutoff limit.
    #[error("cutoff exhausted at lambda = {cutoff}: best tail bound {best_bound:e} exceeds tolerance {tolerance:e}")]
    CutoffExhausted {
        cutoff: f64,
        best_bound: f64,
        tolerance: f64,
    },

    /// Adaptive quadrature ran out of subdivisions before reaching its tolerance.
    #[error("quadrature did not converge: estimate {estimate} with error {error:e}")]
    QuadratureNonconvergence { estimate: f64, error: f64 },

    #[error("least-squares fit is ill-conditioned (condition number {condition:e})")]
    FitUnstable { condition: f64 },
}

impl Error {
    /// Short machine-readable label used in structured error payloads.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::OutOfRange(_) => "out_of_range",
            Error::CutoffExhausted { .. } => "cutoff_exhausted",
            Error::QuadratureNonconvergence { .. } => "numeric",
            Error::FitUnstable { .. } => "fit_unstable",
        }
    }

    /// Whether the error stems from bad input rather than a numerical failure.
    pub fn is_invalid_input(&self) -> bool {
        matches!(self, Error::InvalidArgument(_) | Error::OutOfRange(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
