use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} exceeds {bound:.3e})")]
    NotHermitian { asymmetry: f64, bound: f64 },

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:.3e} below {bound:.3e})")]
    NotPsd { min_eigenvalue: f64, bound: f64 },

    #[error("iterative eigen/singular value solver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("matrix is not an isometry (residual {residual:.3e})")]
    NotIsometry { residual: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("channel is not trace preserving (residual {residual:.3e})")]
    NotTracePreserving { residual: f64 },

    #[error("correlation matrix diagonal deviates from 1 by {deviation:.3e}")]
    DiagonalNotOne { deviation: f64 },

    #[error("rank {rank} of L_Z(A) exceeds block size {k}")]
    RankTooHigh { rank: usize, k: usize },

    #[error("block Gram matrix is not of the form L_Z(A) (residual {residual:.3e})")]
    NotInSpan { residual: f64 },

    #[error("point is outside the spectrahedron (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotInSpectrahedron { min_eigenvalue: f64 },

    #[error("point traces do not vanish (max |Tr A_i| = {max_trace:.3e})")]
    TraceNotZero { max_trace: f64 },

    #[error("factorization certificate rejected: {0}")]
    CertificateInvalid(String),

    #[error("invalid factor algebra: {0}")]
    InvalidAlgebra(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable identifier used in CLI error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NonFinite => "NonFinite",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotPsd { .. } => "NotPSD",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::NotIsometry { .. } => "NotIsometry",
            Error::NotUnitary { .. } => "NotUnitary",
            Error::NotTracePreserving { .. } => "NotTracePreserving",
            Error::DiagonalNotOne { .. } => "DiagonalNotOne",
            Error::RankTooHigh { .. } => "RankTooHigh",
            Error::NotInSpan { .. } => "NotInSpan",
            Error::NotInSpectrahedron { .. } => "NotInSpectrahedron",
            Error::TraceNotZero { .. } => "TraceNotZero",
            Error::CertificateInvalid(_) => "CertificateInvalid",
            Error::InvalidAlgebra(_) => "InvalidAlgebra",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// Errors that indicate malformed input rather than a failed check.
    pub fn is_malformed_input(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch(_)
                | Error::NonFinite
                | Error::InvalidAlgebra(_)
                | Error::InvalidArgument(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn mismatch(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}
