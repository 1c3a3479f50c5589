//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors from matrix kernels, channel validation, verification and
/// recovery construction.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: relative defect {defect:.3e} exceeds {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("columns are not orthonormal: defect {defect:.3e} exceeds {tol:.3e}")]
    NotIsometry { defect: f64, tol: f64 },

    #[error("matrix is not unitary: defect {defect:.3e} exceeds {tol:.3e}")]
    NotUnitary { defect: f64, tol: f64 },

    #[error("eigensolver did not converge: off-diagonal mass {off:.3e} after {sweeps} sweeps")]
    EigConvergence { off: f64, sweeps: usize },

    #[error("unitary completion exhausted the candidate basis")]
    CompletionFailed,

    #[error("not a density matrix: {reason}")]
    NotDensityMatrix { reason: String },

    #[error("channel has an empty Kraus list")]
    EmptyKraus,

    #[error("channel and code are not correctable: residual {residual:.3e} exceeds threshold {threshold:.3e}")]
    NotCorrectable { residual: f64, threshold: f64 },

    #[error("ancilla state is singular (effective rank {q}); the channel acts as zero on the code")]
    SingularAncilla { q: usize },

    #[error("report is inconsistent with the channel/code: R1 isometry defect {defect:.3e}")]
    InconsistentReport { defect: f64 },

    #[error("error operators leave the recoverable span: residual {residual:.3e} exceeds {tol:.3e}")]
    SpanViolation { residual: f64, tol: f64 },

    #[error("invalid probabilities: {reason}")]
    InvalidProbabilities { reason: String },
}
