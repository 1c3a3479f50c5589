//! Measurement-free recovery construction.
//!
//! For a correctable pair (Φ, W) the verifier supplies U, ξ and q with
//! U†ΛU = ξ ⊕ 0. Rotating the error operators by U gives an operator-sum
//! representation F̃_j = Σ_i u_ij F_i of the same channel in which only the
//! first q operators act on the code. Stacking their restrictions and
//! whitening by ξ^{-1/2},
//!
//! ```text
//! R₁ = [F̃_1 W … F̃_q W] (ξ^{-1/2} ⊗ I_k),
//! ```
//!
//! produces an n×qk isometry, which is completed to a unitary R = [R₁ R₂].
//! Conjugating any channel output of an encoded state by R† then yields
//! (ξ ⊗ ρ̃) ⊕ 0, so the data state is recovered by reading off the leading
//! block and tracing out the q-dimensional ancilla factor — a unitary gate
//! plus a partial trace, no syndrome measurement and no projection.
//!
//! The same R keeps working for any other channel whose error operators are
//! linear combinations of the original ones; [`extend_plan`] computes the
//! coefficient matrix T and the new ancilla state ξ̃ = ξ^{1/2} T T† ξ^{1/2}.

use num_complex::Complex64;

use crate::channel::{CodeIsometry, QuantumChannel};
use crate::error::{Error, Result};
use crate::factor::complete_to_unitary;
use crate::kl::KlReport;
use crate::mat::ComplexMatrix;
use crate::tol;

/// Everything needed to run recovery: the unitary R, the ancilla state ξ,
/// the effective rank q, the code isometry and the rotated Kraus operators.
#[derive(Debug, Clone)]
pub struct RecoveryPlan {
    /// The recovery unitary R = [R₁ R₂], n×n.
    pub r_unitary: ComplexMatrix,
    /// Ancilla state ξ (diagonal, positive, descending), q×q.
    pub xi: ComplexMatrix,
    /// Effective error rank.
    pub q: usize,
    /// The code the plan was built for.
    pub code: CodeIsometry,
    /// Rotated Kraus operators F̃_j = Σ_i u_ij F_i (all r of them; only the
    /// first q act on the code).
    pub rotated_kraus: Vec<ComplexMatrix>,
    /// tr ξ; equals 1 for trace-preserving channels.
    pub gamma: f64,
}

/// Result of extending a plan to a new channel built from linear
/// combinations of the original error operators.
#[derive(Debug, Clone)]
pub struct PlanExtension {
    /// New ancilla state ξ̃ = ξ^{1/2} T T† ξ^{1/2}, q×q Hermitian PSD.
    pub xi_tilde: ComplexMatrix,
    /// Coefficient matrix T (q×s): column j expands the j-th new operator's
    /// action on the code over the plan's first q rotated operators.
    pub coeffs: ComplexMatrix,
    /// Worst span-membership defect, relative to the largest restricted
    /// operator norm.
    pub residual: f64,
}

/// Rotates a Kraus list by a unitary: F̃_j = Σ_i u_ij F_i.
///
/// This is the operator-sum representation freedom; the rotated list
/// describes the same channel.
pub fn rotate_kraus(phi: &QuantumChannel, rotation: &ComplexMatrix) -> Result<Vec<ComplexMatrix>> {
    let r = phi.len();
    if rotation.rows() != r || rotation.cols() != r {
        return Err(Error::DimensionMismatch {
            context: "rotate_kraus",
            expected: format!("{r}x{r} rotation"),
            found: format!("{}x{}", rotation.rows(), rotation.cols()),
        });
    }
    let defect = rotation.isometry_defect();
    if defect > tol::VALIDATION {
        return Err(Error::NotUnitary { defect, tol: tol::VALIDATION });
    }
    let n = phi.dim();
    let mut out = Vec::with_capacity(r);
    for j in 0..r {
        let mut acc = ComplexMatrix::zeros(n, n);
        for i in 0..r {
            let u_ij = rotation.get(i, j);
            if u_ij != Complex64::new(0.0, 0.0) {
                acc = &acc + &phi.kraus()[i].scaled(u_ij);
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Builds the recovery plan from a correctable report.
pub fn build_recovery(
    phi: &QuantumChannel,
    code: &CodeIsometry,
    report: &KlReport,
) -> Result<RecoveryPlan> {
    if phi.dim() != code.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "build_recovery",
            expected: format!("channel dimension {}", code.ambient_dim()),
            found: format!("{}", phi.dim()),
        });
    }
    let spectral = report.spectral.as_ref().ok_or(Error::NotCorrectable {
        residual: report.residual,
        threshold: report.threshold,
    })?;
    if !report.correctable {
        return Err(Error::NotCorrectable {
            residual: report.residual,
            threshold: report.threshold,
        });
    }
    let q = spectral.q;
    if q == 0 {
        return Err(Error::SingularAncilla { q });
    }

    let rotated = rotate_kraus(phi, &spectral.rotation)?;
    let w = code.w();
    let k = code.code_dim();
    let n = code.ambient_dim();

    // R₁ column block j is F̃_j W / √ξ_jj; ξ is diagonal so the whitening is
    // a per-block scale.
    let mut blocks = Vec::with_capacity(q);
    for j in 0..q {
        let xi_jj = spectral.xi.get(j, j).re;
        if xi_jj <= 0.0 {
            return Err(Error::SingularAncilla { q });
        }
        blocks.push((&rotated[j] * w).scaled(1.0 / xi_jj.sqrt()));
    }
    let block_refs: Vec<&ComplexMatrix> = blocks.iter().collect();
    let r1 = ComplexMatrix::hconcat(&block_refs)?;
    debug_assert_eq!(r1.cols(), q * k);

    // R₁†R₁ = I_qk holds by construction when the report belongs to this
    // channel/code pair; a visible defect means the inputs were mixed up.
    let defect = r1.isometry_defect();
    if defect > 1e-6 * ((q * k) as f64).sqrt().max(1.0) {
        return Err(Error::InconsistentReport { defect });
    }

    let r_unitary = complete_to_unitary(&r1)?;
    debug_assert_eq!(r_unitary.rows(), n);

    Ok(RecoveryPlan {
        r_unitary,
        xi: spectral.xi.clone(),
        q,
        code: code.clone(),
        rotated_kraus: rotated,
        gamma: spectral.gamma,
    })
}

impl RecoveryPlan {
    /// Ambient dimension n.
    pub fn dim(&self) -> usize {
        self.code.ambient_dim()
    }

    /// Code dimension k.
    pub fn code_dim(&self) -> usize {
        self.code.code_dim()
    }

    /// Conjugates a channel output by the recovery unitary: R† ρ' R.
    ///
    /// On channel outputs of encoded states this is (ξ ⊗ ρ̃) ⊕ 0.
    pub fn conjugate_output(&self, phi_output: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.dim();
        if !phi_output.is_square() || phi_output.rows() != n {
            return Err(Error::DimensionMismatch {
                context: "conjugate_output",
                expected: format!("{n}x{n} matrix"),
                found: format!("{}x{}", phi_output.rows(), phi_output.cols()),
            });
        }
        Ok(&(&self.r_unitary.dagger() * phi_output) * &self.r_unitary)
    }

    /// Recovers the data state from a channel output.
    ///
    /// Returns the decoded k×k state (normalized by γ = tr ξ, so
    /// trace-preserving round trips return ρ̃ with unit trace) together with
    /// the leak: the Frobenius mass of R†ρ'R outside the leading qk×qk
    /// block, which is ≈ 0 for in-code inputs.
    pub fn recover(&self, phi_output: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
        let (raw, leak) = self.decode_block(phi_output)?;
        Ok((raw.scaled(1.0 / self.gamma), leak))
    }

    /// Full recovery channel Ψ(ρ') = W tr₁(R†ρ'R) W†, with no γ division;
    /// composing with the original channel gives Ψ∘Φ(ρ) = γρ on code states.
    pub fn recover_full(&self, phi_output: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (raw, _leak) = self.decode_block(phi_output)?;
        let w = self.code.w();
        Ok(&(w * &raw) * &w.dagger())
    }

    /// Shared decode path: conjugate, cut the leading qk×qk block, trace out
    /// the ancilla factor. Works for any n, also when qk < n.
    fn decode_block(&self, phi_output: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
        let rotated = self.conjugate_output(phi_output)?;
        let qk = self.q * self.code_dim();
        let block = rotated.block(0, 0, qk, qk);
        let total = rotated.frobenius_norm();
        let inside = block.frobenius_norm();
        let leak = (total * total - inside * inside).max(0.0).sqrt();
        let data = block.partial_trace_first(self.q, self.code_dim())?;
        Ok((data, leak))
    }
}

/// Extends a plan to a new channel with the default span tolerance.
pub fn extend_plan(plan: &RecoveryPlan, new_phi: &QuantumChannel) -> Result<PlanExtension> {
    extend_plan_with(plan, new_phi, tol::SPAN)
}

/// Extends a plan to a channel whose error operators lie in the linear span
/// of the plan's rotated operators.
///
/// Coefficients are solved by least squares of each restricted operator
/// G_j W against the basis {F̃_i W}_{i≤q}; the Gram matrix of that basis is
/// k·ξ, which is diagonal and invertible, so the solution is direct. The
/// worst span-membership defect is measured relative to the largest ‖G_j W‖
/// and must stay below `span_tol`; otherwise the new channel is not
/// correctable by this plan and the call fails.
pub fn extend_plan_with(
    plan: &RecoveryPlan,
    new_phi: &QuantumChannel,
    span_tol: f64,
) -> Result<PlanExtension> {
    let n = plan.dim();
    if new_phi.dim() != n {
        return Err(Error::DimensionMismatch {
            context: "extend_plan",
            expected: format!("channel dimension {n}"),
            found: format!("{}", new_phi.dim()),
        });
    }
    let q = plan.q;
    let k = plan.code_dim();
    let w = plan.code.w();
    let s = new_phi.len();

    let basis: Vec<ComplexMatrix> = (0..q).map(|i| &plan.rotated_kraus[i] * w).collect();
    let restricted: Vec<ComplexMatrix> = new_phi.kraus().iter().map(|g| g * w).collect();
    let scale = restricted
        .iter()
        .map(ComplexMatrix::frobenius_norm)
        .fold(0.0f64, f64::max);

    let mut coeffs = ComplexMatrix::zeros(q, s);
    let mut worst = 0.0f64;
    for j in 0..s {
        let mut fitted = ComplexMatrix::zeros(n, k);
        for i in 0..q {
            // <F̃_i W, G_j W> / (k ξ_ii)
            let mut inner = Complex64::new(0.0, 0.0);
            for (a, b) in basis[i].entries().iter().zip(restricted[j].entries()) {
                inner += a.conj() * b;
            }
            let t_ij = inner / Complex64::new(k as f64 * plan.xi.get(i, i).re, 0.0);
            coeffs.set(i, j, t_ij);
            fitted = &fitted + &basis[i].scaled(t_ij);
        }
        let defect = fitted.dist(&restricted[j]);
        if defect > worst {
            worst = defect;
        }
    }
    let residual = if scale > 0.0 { worst / scale } else { 0.0 };
    if residual > span_tol {
        return Err(Error::SpanViolation { residual, tol: span_tol });
    }

    // ξ̃ = ξ^{1/2} T T† ξ^{1/2}; with diagonal ξ this is M M† where M scales
    // row i of T by √ξ_ii.
    let m = ComplexMatrix::from_fn(q, s, |i, j| {
        coeffs.get(i, j) * Complex64::new(plan.xi.get(i, i).re.sqrt(), 0.0)
    });
    let xi_tilde = &m * &m.dagger();

    Ok(PlanExtension { xi_tilde, coeffs, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::DensityMatrix;
    use crate::fixtures;
    use crate::kl::verify_correctable;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plan_for(inst: &fixtures::CorrectableInstance) -> RecoveryPlan {
        let report = verify_correctable(&inst.channel, &inst.code, tol::CORRECTABLE).unwrap();
        build_recovery(&inst.channel, &inst.code, &report).unwrap()
    }

    #[test]
    fn identity_rotation_keeps_kraus_list() {
        let inst = fixtures::example2([0.4, 0.3, 0.2, 0.1]).unwrap();
        let rotated = rotate_kraus(&inst.channel, &ComplexMatrix::identity(4)).unwrap();
        for (a, b) in rotated.iter().zip(inst.channel.kraus()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn hadamard_mix_preserves_channel_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = fixtures::random_matrix(3, 3, &mut rng);
        let b = fixtures::random_matrix(3, 3, &mut rng);
        let phi = QuantumChannel::new(vec![a.clone(), b.clone()]).unwrap();
        let s = 0.5f64.sqrt();
        let h = ComplexMatrix::new(2, 2, vec![c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]).unwrap();
        let rotated = rotate_kraus(&phi, &h).unwrap();
        assert!(rotated[0].dist(&(&a + &b).scaled(s)) < 1e-14);
        assert!(rotated[1].dist(&(&a - &b).scaled(s)) < 1e-14);

        let rho = fixtures::random_matrix(3, 3, &mut rng);
        let original = phi.apply(&rho).unwrap();
        let mixed = QuantumChannel::new(rotated).unwrap().apply(&rho).unwrap();
        assert!(original.dist(&mixed) <= 1e-12 * (1.0 + original.frobenius_norm()));
    }

    #[test]
    fn rotate_kraus_rejects_non_unitary() {
        let inst = fixtures::example1();
        let bad = ComplexMatrix::diag_real(&[1.0, 0.5]);
        assert!(matches!(
            rotate_kraus(&inst.channel, &bad),
            Err(Error::NotUnitary { .. })
        ));
        let wrong_size = ComplexMatrix::identity(3);
        assert!(matches!(
            rotate_kraus(&inst.channel, &wrong_size),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bit_flip_recovery_is_the_known_permutation() {
        // With descending probabilities the construction reproduces the
        // closed-form permutation recovery for the three-qubit repetition
        // code exactly.
        let inst = fixtures::example2([0.4, 0.3, 0.2, 0.1]).unwrap();
        let plan = plan_for(&inst);
        assert!(plan.r_unitary.dist(&fixtures::bit_flip_recovery_permutation()) < 1e-12);
        assert!(plan.r_unitary.isometry_defect() <= 1e-10);
    }

    #[test]
    fn phase_mix_recovery_matches_closed_form() {
        // For the 4-level mixed-unitary instance the construction lands on
        // the known closed-form R itself (ties in ξ keep the natural basis).
        let inst = fixtures::example1();
        let plan = plan_for(&inst);
        assert!(plan.r_unitary.dist(&fixtures::phase_mix_recovery_unitary()) < 1e-12);
        assert_eq!(plan.q, 2);
        assert!(plan.xi.dist(&ComplexMatrix::diag_real(&[0.5, 0.5])) < 1e-12);
    }

    #[test]
    fn identity_channel_has_trivial_plan() {
        let phi = QuantumChannel::new(vec![ComplexMatrix::identity(3)]).unwrap();
        let code = CodeIsometry::new(ComplexMatrix::identity(3)).unwrap();
        let report = verify_correctable(&phi, &code, tol::CORRECTABLE).unwrap();
        let plan = build_recovery(&phi, &code, &report).unwrap();
        assert_eq!(plan.q, 1);
        assert!(plan.xi.dist(&ComplexMatrix::diag_real(&[1.0])) < 1e-14);
        assert!(plan.r_unitary.dist(&ComplexMatrix::identity(3)) < 1e-14);

        let data = DensityMatrix::new(ComplexMatrix::diag_real(&[0.25, 0.25, 0.5])).unwrap();
        let (back, leak) = plan.recover(data.matrix()).unwrap();
        assert!(back.dist(data.matrix()) < 1e-13);
        assert!(leak < 1e-13);
    }

    #[test]
    fn conjugate_output_factorizes_bit_flip() {
        let p = [0.4, 0.3, 0.2, 0.1];
        let inst = fixtures::example2(p).unwrap();
        let plan = plan_for(&inst);
        let data = DensityMatrix::pure(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let rho = inst.code.encode(&data).unwrap();
        let out = inst.channel.apply(&rho).unwrap();
        let rotated = plan.conjugate_output(&out).unwrap();
        let expect = ComplexMatrix::diag_real(&p).kron(data.matrix());
        assert!(rotated.dist(&expect) < 1e-12);

        let zero = ComplexMatrix::zeros(8, 8);
        assert!(plan.conjugate_output(&zero).unwrap().dist(&zero) < 1e-15);
    }

    #[test]
    fn recovery_round_trip_is_exact() {
        let inst = fixtures::example2([0.7, 0.1, 0.1, 0.1]).unwrap();
        let plan = plan_for(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..20 {
            let data = if trial % 2 == 0 {
                fixtures::random_pure_state(2, &mut rng)
            } else {
                fixtures::random_mixed_state(2, &mut rng)
            };
            let rho = &(inst.code.w() * &data) * &inst.code.w().dagger();
            let out = inst.channel.apply(&rho).unwrap();
            let (back, leak) = plan.recover(&out).unwrap();
            assert!(back.dist(&data) <= 1e-9);
            assert!(leak <= 1e-9);
        }
    }

    #[test]
    fn recover_full_reproduces_encoded_state() {
        let inst = fixtures::example2([0.4, 0.3, 0.2, 0.1]).unwrap();
        let plan = plan_for(&inst);
        let data = DensityMatrix::pure(&[c(0.28, 0.0), c(0.0, 0.96)]).unwrap();
        let rho = inst.code.encode(&data).unwrap();
        let out = inst.channel.apply(&rho).unwrap();
        let back = plan.recover_full(&out).unwrap();
        assert!(back.dist(&rho) <= 1e-10);

        let zero = ComplexMatrix::zeros(8, 8);
        assert!(plan.recover_full(&zero).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn sub_normalized_channel_recovers_scaled_state() {
        // Halving all probabilities scales the channel: Ψ∘Φ(ρ) = γρ with
        // γ = 1/2, while recover() re-normalizes to the exact data state.
        let inst = fixtures::example2([0.2, 0.15, 0.1, 0.05]).unwrap();
        let plan = plan_for(&inst);
        assert!((plan.gamma - 0.5).abs() < 1e-12);
        let data = DensityMatrix::pure(&[c(0.6, 0.0), c(0.8, 0.0)]).unwrap();
        let rho = inst.code.encode(&data).unwrap();
        let out = inst.channel.apply(&rho).unwrap();

        let full = plan.recover_full(&out).unwrap();
        assert!(full.dist(&rho.scaled(0.5)) <= 1e-10);
        let (back, _) = plan.recover(&out).unwrap();
        assert!(back.dist(data.matrix()) <= 1e-10);
    }

    #[test]
    fn non_correctable_report_is_rejected() {
        let s = 0.5f64.sqrt();
        let x = ComplexMatrix::from_fn(2, 2, |i, j| if i != j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let id2 = ComplexMatrix::identity(2);
        let phi = QuantumChannel::new(vec![
            ComplexMatrix::identity(8).scaled(s),
            x.kron(&id2).kron(&id2).scaled(s),
        ])
        .unwrap();
        let mut w = ComplexMatrix::zeros(8, 2);
        w.set(0, 0, c(1.0, 0.0));
        w.set(4, 1, c(1.0, 0.0));
        let code = CodeIsometry::new(w).unwrap();
        let report = verify_correctable(&phi, &code, tol::CORRECTABLE).unwrap();
        assert!(matches!(
            build_recovery(&phi, &code, &report),
            Err(Error::NotCorrectable { .. })
        ));
    }

    #[test]
    fn extending_with_the_original_channel_returns_xi() {
        let inst = fixtures::example2([0.4, 0.3, 0.2, 0.1]).unwrap();
        let plan = plan_for(&inst);
        let ext = extend_plan(&plan, &inst.channel).unwrap();
        assert!(ext.residual < 1e-12);
        assert!(ext.xi_tilde.dist(&plan.xi) < 1e-12);
    }

    #[test]
    fn extension_recovers_synthesized_coefficients() {
        // Build a new channel from known coefficients and check that the
        // least-squares fit reproduces them and the predicted ancilla state.
        let inst = fixtures::example2([0.4, 0.3, 0.2, 0.1]).unwrap();
        let plan = plan_for(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let t_known = fixtures::random_matrix(4, 3, &mut rng).scaled(0.4);
        let kraus: Vec<ComplexMatrix> = (0..3)
            .map(|j| {
                let mut acc = ComplexMatrix::zeros(8, 8);
                for i in 0..4 {
                    acc = &acc + &plan.rotated_kraus[i].scaled(t_known.get(i, j));
                }
                acc
            })
            .collect();
        let new_phi = QuantumChannel::new(kraus).unwrap();
        let ext = extend_plan(&plan, &new_phi).unwrap();
        assert!(ext.coeffs.dist(&t_known) <= 1e-9);

        let m = ComplexMatrix::from_fn(4, 3, |i, j| {
            t_known.get(i, j) * Complex64::new(plan.xi.get(i, i).re.sqrt(), 0.0)
        });
        let expect = &m * &m.dagger();
        assert!(ext.xi_tilde.dist(&expect) <= 1e-9);
    }

    #[test]
    fn extension_rejects_operators_outside_the_span() {
        let inst = fixtures::example2([0.4, 0.3, 0.2, 0.1]).unwrap();
        let plan = plan_for(&inst);
        // Phase-flip errors are orthogonal to every bit-flip image on the
        // code, so the span check must fail.
        let z = ComplexMatrix::diag_real(&[1.0, -1.0]);
        let id2 = ComplexMatrix::identity(2);
        let s = 0.5f64.sqrt();
        let new_phi = QuantumChannel::new(vec![
            ComplexMatrix::identity(8).scaled(s),
            z.kron(&id2).kron(&id2).scaled(s),
        ])
        .unwrap();
        match extend_plan(&plan, &new_phi) {
            Err(Error::SpanViolation { residual, .. }) => assert!(residual > 0.5),
            other => panic!("expected span violation, got {other:?}"),
        }
    }
}
