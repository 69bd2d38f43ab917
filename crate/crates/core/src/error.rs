use thiserror::Error;

/// Errors raised by the extraction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("basis is not orthonormal (max residual {residual:e})")]
    InconsistentBasis { residual: f64 },

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error(
        "matrix is rank deficient (sigma_min = {sigma_min:e}, sigma_max = {sigma_max:e})"
    )]
    RankDeficient { sigma_min: f64, sigma_max: f64 },

    #[error("matrix is singular to working precision (pivot {pivot:e} at column {column})")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error(
        "superoperator is not a valid dissipator (trace residual {trace_residual:e}, \
         hermiticity residual {hermiticity_residual:e})"
    )]
    InvalidDissipator {
        trace_residual: f64,
        hermiticity_residual: f64,
    },

    #[error("superoperator does not preserve Hermiticity (imaginary residue {residual:e})")]
    NotHermiticityPreserving { residual: f64 },

    #[error(
        "rates are not representable by a GKLS dissipator in this basis \
         (least-squares residual {residual:e})"
    )]
    NotGklsRepresentable { residual: f64 },

    #[error("transformation tensor construction failed: {0}")]
    TensorConstruction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
