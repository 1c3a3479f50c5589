//! Verification and measurement-free recovery for quantum error correcting
//! codes.
//!
//! Given a channel in operator-sum form Φ(ρ) = Σ_j F_j ρ F_j† and a candidate
//! code subspace represented by an isometry W, this crate
//!
//! 1. checks the Knill–Laflamme condition P F_i†F_j P = λ_ij P and reports
//!    the Gram matrix Λ with per-pair residuals ([`kl`]),
//! 2. constructs a single recovery unitary R with
//!    R†Φ(Wρ̃W†)R = (ξ ⊗ ρ̃) ⊕ 0, so decoding is one unitary followed by a
//!    partial trace — no syndrome measurement, no projection ([`recovery`]),
//! 3. reuses the same R for any channel whose error operators are linear
//!    combinations of the original ones ([`recovery::extend_plan`]).
//!
//! Sub-normalized channels (Σ F_j†F_j ≤ I) are supported throughout; for
//! trace-preserving channels the ancilla state satisfies tr ξ = 1.
//!
//! # Example
//!
//! ```
//! use qrec_core::{build_recovery, fixtures, verify_correctable, tol};
//!
//! // Three-qubit bit-flip channel on the repetition code.
//! let inst = fixtures::example2([0.7, 0.1, 0.1, 0.1])?;
//! let report = verify_correctable(&inst.channel, &inst.code, tol::CORRECTABLE)?;
//! assert!(report.correctable);
//!
//! let plan = build_recovery(&inst.channel, &inst.code, &report)?;
//! let data = fixtures::random_pure_state(2, &mut fixtures::seeded_rng(7));
//! let encoded = &(inst.code.w() * &data) * &inst.code.w().dagger();
//! let noisy = inst.channel.apply(&encoded)?;
//! let (decoded, leak) = plan.recover(&noisy)?;
//! assert!(decoded.dist(&data) < 1e-9 && leak < 1e-9);
//! # Ok::<(), qrec_core::Error>(())
//! ```

pub mod channel;
pub mod error;
pub mod factor;
pub mod fixtures;
pub mod kl;
pub mod mat;
pub mod recovery;

/// Default tolerances. All are overridable at the call sites that use them.
pub mod tol {
    /// Relative Frobenius tolerance for factorization checks.
    pub const FACTOR: f64 = 1e-10;
    /// Correctability threshold, relative to ‖Λ‖_F.
    pub const CORRECTABLE: f64 = 1e-8;
    /// Eigenvalue rank cut, relative to the largest eigenvalue of Λ.
    pub const RANK: f64 = 1e-9;
    /// Span-membership threshold when extending a plan.
    pub const SPAN: f64 = 1e-8;
    /// Validation tolerance for density matrices, isometries and rotations.
    pub const VALIDATION: f64 = 1e-8;
    /// Residual-norm pivot threshold in unitary completion.
    pub const COMPLETION_SKIP: f64 = 1e-8;
}

pub use channel::{CodeIsometry, DensityMatrix, QuantumChannel};
pub use error::{Error, Result};
pub use factor::{complete_to_unitary, complete_to_unitary_with, hermitian_eig, hermitian_eig_with, HermitianEig};
pub use kl::{compute_lambda, verify_correctable, verify_correctable_with, KlOptions, KlReport, KlSpectral, LambdaEstimate};
pub use mat::ComplexMatrix;
pub use num_complex::Complex64;
pub use recovery::{build_recovery, extend_plan, extend_plan_with, rotate_kraus, PlanExtension, RecoveryPlan};
