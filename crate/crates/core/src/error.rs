use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical kernels and model builders.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("resolvent requested at or near a spectral value (nearest eigenvalue {nearest})")]
    SpectralValueHit {
        nearest: Complex64,
        /// Offending mode index for diagonal (mode) operators.
        mode: Option<usize>,
    },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("series does not converge: contraction estimate {0:.3e} >= 1")]
    SeriesDiverges(f64),

    #[error("{0} is not an eigenvalue (nearest {1})")]
    NotAnEigenvalue(Complex64, Complex64),

    #[error("contour passes within {0:.3e} of the spectrum")]
    ContourHitsSpectrum(f64),

    #[error("power iteration did not converge")]
    NoConvergence { trace: Vec<f64> },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("truncation tail bound {0:.3e} exceeds tolerance")]
    TailTooLarge(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

impl Error {
    /// Errors caused by the request itself rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::Parse(_) | Error::InvalidGrid(_) | Error::InvalidParameters(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
