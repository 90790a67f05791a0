use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("Hilbert space dimension {dim} exceeds the cap {cap}")]
    DimensionOverflow { dim: u128, cap: usize },

    #[error("spectrum is empty")]
    EmptySpectrum,

    #[error("temperature must be positive and finite, got {0}")]
    NonPositiveTemperature(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not reach tolerance: estimate {estimate}, error estimate {error}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("eigensolver failed to converge")]
    Eigensolver,

    #[error("projector is not idempotent/Hermitian (defect {defect:e})")]
    NotAProjector { defect: f64 },

    #[error("inconsistent witness inputs: separable bound {eb} lies below ground energy {e0}")]
    InvalidBound { e0: f64, eb: f64 },

    #[error("weights must be nonnegative and sum to 1 (sum = {sum})")]
    WeightNormalization { sum: f64 },
}

impl Error {
    /// True for failures of an iterative numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Quadrature { .. } | Error::Eigensolver)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
