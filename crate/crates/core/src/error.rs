use thiserror::Error;

/// Errors raised by the constitutive, mesh and solver layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-positive Jacobian: det F = {0:e}")]
    NonPositiveJacobian(f64),

    #[error("phase field value {0} outside [0, 1]")]
    OutOfRangeZ(f64),

    #[error("parameter `{name}` must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("invalid invariant {name} = {value} (must be >= 3)")]
    InvalidInvariant { name: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigen-decomposition residual {residual:e} exceeds tolerance")]
    EigenNotConverged { residual: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid slit: {0}")]
    InvalidSlit(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("singular tangent: {0}")]
    SingularTangent(String),

    #[error("Newton iteration diverged after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("no crack found: {0}")]
    NoCrackFound(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation failed:\n  - {}", .0.join("\n  - "))]
    Validation(Vec<String>),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
