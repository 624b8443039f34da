use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square or has a ragged row")]
    NotSquare,

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("matrix is not Hermitian (relative residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("density matrix is not invertible (min eigenvalue {min_eigenvalue:e})")]
    NotInvertible { min_eigenvalue: f64 },

    #[error("matrix is not unitary (residual {residual:e})")]
    NonUnitary { residual: f64 },

    #[error("reversing operation is not involutive (residual {residual:e})")]
    NotInvolutive { residual: f64 },

    #[error("reversing operation violates {property} (residual {residual:e})")]
    NotAntiAutomorphism { property: &'static str, residual: f64 },

    #[error("Kraus operator list is empty")]
    EmptyKraus,

    #[error("input is not dynamics: {0}")]
    InputNotDynamics(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("schema error in `{field}`: {reason}")]
    Schema { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn schema(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
