use alloc::string::String;

/// Errors produced anywhere in the reconstruction toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("jet order {got} too low, need at least {need}")]
    OrderTooLow { got: usize, need: usize },

    #[error("jet order {0} exceeds the supported maximum of {max}", max = crate::jet::MAX_ORDER)]
    OrderTooHigh(usize),

    #[error("{func} is undefined at {value}")]
    Domain { func: &'static str, value: f64 },

    #[error("singular matrix (smallest singular value {min_singular_value:e})")]
    Singular { min_singular_value: f64 },

    #[error("co-metric is not positive definite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("variable x{index} out of range for dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },

    #[error("unsupported spec: {0}")]
    Unsupported(String),

    #[error("unknown catalog manifold `{0}`")]
    UnknownManifold(String),

    #[error("non-symmetric generator: no invariant density (closedness residual {closedness:e})")]
    NoInvariantDensity { closedness: f64 },

    #[error("ill-conditioned solve (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("time {t} too small: posterior within 1e-12 of 0 or 1")]
    TimeTooSmall { t: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
