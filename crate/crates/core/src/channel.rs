//! Channels in operator-sum form, code subspaces given as isometries, and
//! density matrices.
//!
//! A channel is a completely positive map Φ(ρ) = Σ_j F_j ρ F_j†. Trace
//! preservation (Σ_j F_j†F_j = I) is *not* required: sub-normalized channels
//! are accepted everywhere, and trace-preserving-only claims are checked
//! conditionally by callers. A code subspace is carried as an isometry
//! W (n×k, W†W = I_k); its projector is P = WW†.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::factor::hermitian_eig_with;
use crate::mat::ComplexMatrix;
use crate::tol;

/// Quantum channel as an ordered list of Kraus operators on an
/// `n`-dimensional space.
///
/// The order of the list is significant and preserved: extension
/// coefficients are always expressed relative to it.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl QuantumChannel {
    /// Builds a channel from a non-empty list of equal-size square Kraus
    /// operators.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKraus)?;
        if !first.is_square() {
            return Err(Error::DimensionMismatch {
                context: "QuantumChannel::new",
                expected: "square Kraus operators".into(),
                found: format!("{}x{}", first.rows(), first.cols()),
            });
        }
        let dim = first.rows();
        for f in &kraus {
            if f.rows() != dim || f.cols() != dim {
                return Err(Error::DimensionMismatch {
                    context: "QuantumChannel::new",
                    expected: format!("{dim}x{dim} Kraus operators"),
                    found: format!("{}x{}", f.rows(), f.cols()),
                });
            }
        }
        Ok(Self { dim, kraus })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Number of Kraus operators.
    pub fn len(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kraus.is_empty()
    }

    /// Applies the channel: Σ_j F_j ρ F_j†.
    ///
    /// Accepts any square matrix of the right dimension, not only states;
    /// linearity checks need non-state inputs.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !rho.is_square() || rho.rows() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "QuantumChannel::apply",
                expected: format!("{}x{} input", self.dim, self.dim),
                found: format!("{}x{}", rho.rows(), rho.cols()),
            });
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for f in &self.kraus {
            let term = &(f * rho) * &f.dagger();
            out = &out + &term;
        }
        Ok(out)
    }

    /// `‖Σ_j F_j†F_j − I‖_F`.
    pub fn trace_preserving_residual(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
        for f in &self.kraus {
            acc = &acc + &(&f.dagger() * f);
        }
        acc.dist(&ComplexMatrix::identity(self.dim))
    }

    /// Whether the channel is trace preserving within `tol`, together with
    /// the residual that was measured.
    pub fn is_trace_preserving(&self, tol: f64) -> (bool, f64) {
        let residual = self.trace_preserving_residual();
        (residual <= tol, residual)
    }
}

/// Code subspace represented by an isometry W with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeIsometry {
    w: ComplexMatrix,
}

impl CodeIsometry {
    /// Validates W†W = I_k (within the crate validation tolerance) and wraps
    /// the isometry.
    pub fn new(w: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(w, tol::VALIDATION)
    }

    /// Same as [`CodeIsometry::new`] with an explicit tolerance.
    pub fn with_tolerance(w: ComplexMatrix, tol: f64) -> Result<Self> {
        if w.cols() > w.rows() {
            return Err(Error::DimensionMismatch {
                context: "CodeIsometry::new",
                expected: "code dimension at most the ambient dimension".into(),
                found: format!("{}x{}", w.rows(), w.cols()),
            });
        }
        let defect = w.isometry_defect();
        if defect > tol {
            return Err(Error::NotIsometry { defect, tol });
        }
        Ok(Self { w })
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.w.rows()
    }

    #[inline]
    pub fn code_dim(&self) -> usize {
        self.w.cols()
    }

    pub fn w(&self) -> &ComplexMatrix {
        &self.w
    }

    /// Orthogonal projector P = WW† onto the code subspace.
    pub fn projector(&self) -> ComplexMatrix {
        &self.w * &self.w.dagger()
    }

    /// Encodes a data state: ρ = W ρ̃ W†.
    pub fn encode(&self, data: &DensityMatrix) -> Result<ComplexMatrix> {
        if data.dim() != self.code_dim() {
            return Err(Error::DimensionMismatch {
                context: "CodeIsometry::encode",
                expected: format!("{}x{} data state", self.code_dim(), self.code_dim()),
                found: format!("{}x{}", data.dim(), data.dim()),
            });
        }
        Ok(&(&self.w * data.matrix()) * &self.w.dagger())
    }
}

/// Validated density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates the three state properties at the crate validation
    /// tolerance (hermiticity and trace relative, smallest eigenvalue
    /// bounded below by -tol).
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, tol::VALIDATION)
    }

    /// Same as [`DensityMatrix::new`] with an explicit tolerance.
    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotDensityMatrix {
                reason: format!("not square: {}x{}", m.rows(), m.cols()),
            });
        }
        let norm = m.frobenius_norm().max(f64::MIN_POSITIVE);
        let herm = m.hermiticity_defect();
        if herm > tol * norm {
            return Err(Error::NotDensityMatrix {
                reason: format!("hermiticity defect {herm:.3e}"),
            });
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::NotDensityMatrix {
                reason: format!("trace {:.6} + {:.3e}i is not 1", tr.re, tr.im),
            });
        }
        let eig = hermitian_eig_with(&m, tol)?;
        if let Some(&min) = eig.values.last() {
            if min < -tol {
                return Err(Error::NotDensityMatrix {
                    reason: format!("negative eigenvalue {min:.3e}"),
                });
            }
        }
        Ok(Self { m })
    }

    /// Pure state |ψ⟩⟨ψ| from a normalized amplitude vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tol::VALIDATION {
            return Err(Error::NotDensityMatrix {
                reason: format!("amplitude norm² = {norm_sq:.6}"),
            });
        }
        let k = amplitudes.len();
        let m = ComplexMatrix::from_fn(k, k, |i, j| amplitudes[i] * amplitudes[j].conj());
        Ok(Self { m })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_square(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    /// Mixed-unitary channel (ρ + UρU†)/2 with U = diag(1, -1, i, -i).
    fn phase_mix_channel() -> QuantumChannel {
        let s = 1.0 / 2.0f64.sqrt();
        let u = ComplexMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)]);
        QuantumChannel::new(vec![ComplexMatrix::identity(4).scaled(s), u.scaled(s)]).unwrap()
    }

    fn half_half_code() -> CodeIsometry {
        let s = 1.0 / 2.0f64.sqrt();
        CodeIsometry::new(ComplexMatrix::from_fn(4, 2, |i, j| match (i, j) {
            (0, 0) | (1, 0) | (2, 1) | (3, 1) => c(s, 0.0),
            _ => c(0.0, 0.0),
        }))
        .unwrap()
    }

    #[test]
    fn identity_channel_is_noop() {
        let phi = QuantumChannel::new(vec![ComplexMatrix::identity(3)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rho = random_square(3, &mut rng);
        assert!(phi.apply(&rho).unwrap().dist(&rho) < 1e-15);
    }

    #[test]
    fn mixed_unitary_channel_matches_closed_form() {
        let phi = phase_mix_channel();
        let code = half_half_code();
        let data = DensityMatrix::pure(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let rho = code.encode(&data).unwrap();
        let out = phi.apply(&rho).unwrap();

        let u = ComplexMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)]);
        let expect = (&rho + &(&(&u * &rho) * &u.dagger())).scaled(0.5);
        assert!(out.dist(&expect) < 1e-14);
    }

    #[test]
    fn trace_preservation_checks() {
        let phi = phase_mix_channel();
        let (tp, res) = phi.is_trace_preserving(1e-10);
        assert!(tp, "residual {res}");

        let scaled = QuantumChannel::new(vec![ComplexMatrix::identity(2).scaled(0.5f64.sqrt())]).unwrap();
        let (tp, res) = scaled.is_trace_preserving(1e-10);
        assert!(!tp);
        assert!((res - 0.5 * 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn encode_produces_four_corner_state() {
        // Repetition code spanned by |000⟩ and |111⟩: the encoded state has
        // support only on the four corners of the 8x8 matrix.
        let mut w = ComplexMatrix::zeros(8, 2);
        w.set(0, 0, c(1.0, 0.0));
        w.set(7, 1, c(1.0, 0.0));
        let code = CodeIsometry::new(w).unwrap();
        let (alpha, beta) = (c(0.8, 0.0), c(0.36, 0.48));
        let data = DensityMatrix::pure(&[alpha, beta]).unwrap();
        let rho = code.encode(&data).unwrap();

        assert!((rho.get(0, 0) - alpha * alpha.conj()).norm() < 1e-15);
        assert!((rho.get(0, 7) - alpha * beta.conj()).norm() < 1e-15);
        assert!((rho.get(7, 0) - beta * alpha.conj()).norm() < 1e-15);
        assert!((rho.get(7, 7) - beta * beta.conj()).norm() < 1e-15);
        for i in 0..8 {
            for j in 0..8 {
                if (i == 0 || i == 7) && (j == 0 || j == 7) {
                    continue;
                }
                assert_eq!(rho.get(i, j), c(0.0, 0.0));
            }
        }

        let p = code.projector();
        assert_eq!(p, ComplexMatrix::diag_real(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]));
        let back = &(&p * &rho) * &p;
        assert!(back.dist(&rho) < 1e-14);
    }

    #[test]
    fn trivial_code_encodes_identically() {
        let code = CodeIsometry::new(ComplexMatrix::identity(3)).unwrap();
        let data = DensityMatrix::new(ComplexMatrix::diag_real(&[0.5, 0.3, 0.2])).unwrap();
        assert!(code.encode(&data).unwrap().dist(data.matrix()) < 1e-15);
    }

    #[test]
    fn projector_of_half_half_code() {
        let p = half_half_code().projector();
        let expect = ComplexMatrix::from_fn(4, 4, |i, j| {
            let same_block = (i < 2 && j < 2) || (i >= 2 && j >= 2);
            if same_block {
                c(0.5, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        assert!(p.dist(&expect) < 1e-15);
        assert!((&p * &p).dist(&p) < 1e-14);
    }

    #[test]
    fn channel_apply_is_linear() {
        let phi = phase_mix_channel();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..16 {
            let a = random_square(4, &mut rng);
            let b = random_square(4, &mut rng);
            let (ca, cb) = (c(0.3, -0.4), c(-1.2, 0.1));
            let lhs = phi.apply(&(&a.scaled(ca) + &b.scaled(cb))).unwrap();
            let rhs = &phi.apply(&a).unwrap().scaled(ca) + &phi.apply(&b).unwrap().scaled(cb);
            assert!(lhs.dist(&rhs) <= 1e-12 * (1.0 + rhs.frobenius_norm()));
        }
    }

    #[test]
    fn channel_preserves_positivity_and_trace() {
        let phi = phase_mix_channel();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..16 {
            let g = random_square(4, &mut rng);
            let psd = &g * &g.dagger();
            let out = phi.apply(&psd).unwrap();
            assert!((out.trace() - psd.trace()).norm() <= 1e-10 * (1.0 + psd.trace().norm()));
            let eig = hermitian_eig_with(&out, 1e-8).unwrap();
            assert!(*eig.values.last().unwrap() >= -1e-10 * (1.0 + out.frobenius_norm()));
        }
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[0.5, 0.5])).is_ok());
        // trace != 1
        assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[0.7, 0.7])).is_err());
        // negative eigenvalue
        assert!(DensityMatrix::new(ComplexMatrix::diag_real(&[1.5, -0.5])).is_err());
        // non-Hermitian
        let m = ComplexMatrix::new(2, 2, vec![c(0.5, 0.0), c(0.4, 0.0), c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn code_isometry_rejects_bad_columns() {
        let bad = ComplexMatrix::from_fn(3, 2, |i, j| match (i, j) {
            (0, 0) => c(1.0, 0.0),
            (1, 1) => c(0.5, 0.0),
            _ => c(0.0, 0.0),
        });
        match CodeIsometry::new(bad) {
            Err(Error::NotIsometry { defect, .. }) => assert!((defect - 0.75).abs() < 1e-12),
            other => panic!("expected isometry violation, got {other:?}"),
        }
    }

    #[test]
    fn empty_kraus_list_is_rejected() {
        assert!(matches!(QuantumChannel::new(vec![]), Err(Error::EmptyKraus)));
    }
}
