use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("unsupported derivative order {0} (expected 1 or 2)")]
    UnsupportedOrder(u8),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("matrix is not Hermitian: max deviation {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("expectation value has imaginary part {imaginary:e} (tolerance {tolerance:e})")]
    HermiticityViolation { imaginary: f64, tolerance: f64 },

    #[error("eigendecomposition failed: {0}")]
    Convergence(String),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("degeneracy threshold must be positive, got {0}")]
    InvalidEpsilon(f64),

    #[error("operation requires a periodic grid")]
    NonPeriodicGrid,

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("coefficients are not normalized: sum of squared moduli is {0}")]
    NotNormalized(f64),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("box too small: ground-state energy moved by {relative_shift:e} when the box was doubled")]
    BoxTooSmall { relative_shift: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, found })
    }
}
