use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not self-adjoint (asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("decomposition failure: eigen-iteration did not converge within {0} sweeps")]
    DecompositionFailure(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tilde undefined: function `{0}` is not regular (f(0) = 0)")]
    NonRegular(String),

    #[error("metric undefined on non-faithful state")]
    NonFaithful,

    #[error("unknown ensemble `{0}`")]
    UnknownEnsemble(String),

    #[error("unknown function spec `{0}`")]
    UnknownFunction(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("unsupported order {0}")]
    UnsupportedOrder(usize),

    #[error("function `{name}` failed registration: {reason}")]
    Registration { name: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
