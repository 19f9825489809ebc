use thiserror::Error;

/// Errors raised by the qplex library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QplexError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian: max |A_jk - conj(A_kj)| = {max_asymmetry:e}")]
    NotHermitian { max_asymmetry: f64 },

    #[error("matrix is not unitary: max |UU^† - I| = {defect:e}")]
    NotUnitary { defect: f64 },

    #[error("not a density operator: trace {trace}, min eigenvalue {min_eigenvalue:e}")]
    NotDensity { trace: f64, min_eigenvalue: f64 },

    #[error("vector is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("index ({a}, {b}) out of range for dimension {dim}")]
    IndexOutOfRange { a: usize, b: usize, dim: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not a probability vector: {0}")]
    NotProbability(String),

    #[error("not a measurement: {0}")]
    NotMeasurement(String),

    #[error("fiducial defect {defect:e} exceeds limit {limit:e}")]
    DefectTooLarge { defect: f64, limit: f64 },

    #[error("fiducial search failed after {restarts} restarts; best defect {best_defect:e}")]
    SearchFailed { restarts: usize, best_defect: f64 },

    #[error("point is not on the hyperplane <u,c> = 1/N (offset {offset:e})")]
    NotOnHyperplane { offset: f64 },

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("constraint violation: {0}")]
    ConstraintViolation(String),
}

pub type Result<T> = std::result::Result<T, QplexError>;
