//! Hermitian eigendecomposition and unitary completion.
//!
//! The eigensolver is a cyclic Jacobi iteration specialised to complex
//! Hermitian matrices. It is deterministic, needs no external linear
//! algebra backend, and at the sizes this crate targets (n ≲ 256) its
//! accuracy is limited only by accumulated rounding. Eigenvalues come back
//! sorted descending so that the positive block of a rank-deficient matrix
//! occupies the leading coordinates; eigenvector phases are fixed by making
//! the largest-magnitude entry of each column real and positive, which keeps
//! every downstream construction reproducible.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mat::ComplexMatrix;
use crate::tol;

const MAX_SWEEPS: usize = 64;

/// Result of [`hermitian_eig`]: `h = V diag(values) V†`.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Eigenvalues, sorted descending.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: ComplexMatrix,
}

/// Eigendecomposition of a Hermitian matrix with the default tolerance.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEig> {
    hermitian_eig_with(h, tol::FACTOR)
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Rejects inputs whose hermiticity defect exceeds `tol * ‖h‖_F`; the
/// iteration itself runs on the symmetrized matrix (h + h†)/2.
pub fn hermitian_eig_with(h: &ComplexMatrix, tol: f64) -> Result<HermitianEig> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            context: "hermitian_eig",
            expected: "square matrix".into(),
            found: format!("{}x{}", h.rows(), h.cols()),
        });
    }
    let n = h.rows();
    if n == 0 {
        return Ok(HermitianEig {
            values: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let norm = h.frobenius_norm();
    let defect = h.hermiticity_defect();
    if defect > tol * norm {
        return Err(Error::NotHermitian { defect: defect / norm.max(f64::MIN_POSITIVE), tol });
    }

    // Symmetrize and force a real diagonal so rounding in the input cannot
    // leak into the iteration.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| {
        (h.get(i, j) + h.get(j, i).conj()) * Complex64::new(0.5, 0.0)
    });
    for i in 0..n {
        let d = a.get(i, i);
        a.set(i, i, Complex64::new(d.re, 0.0));
    }
    let mut v = ComplexMatrix::identity(n);

    if norm > 0.0 {
        let target = norm * 1e-14 * (n as f64).max(1.0);
        let mut converged = false;
        let mut off = off_diagonal_norm(&a);
        for _sweep in 0..MAX_SWEEPS {
            if off <= target {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate_pair(&mut a, &mut v, p, q, norm);
                }
            }
            off = off_diagonal_norm(&a);
        }
        if !converged && off > target {
            return Err(Error::EigConvergence { off, sweeps: MAX_SWEEPS });
        }
    }

    // Sort descending; the stable sort keeps the iteration's order for ties,
    // so diagonal inputs that are already sorted pass through unchanged.
    let raw: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw[j].partial_cmp(&raw[i]).expect("finite eigenvalues"));

    let values: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    let mut vectors = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    fix_column_phases(&mut vectors);

    Ok(HermitianEig { values, vectors })
}

/// One Jacobi rotation annihilating the (p, q) off-diagonal entry.
fn rotate_pair(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, scale: f64) {
    let apq = a.get(p, q);
    let r = apq.norm();
    if r <= scale * 1e-18 {
        a.set(p, q, Complex64::new(0.0, 0.0));
        a.set(q, p, Complex64::new(0.0, 0.0));
        return;
    }
    let phase = apq / Complex64::new(r, 0.0);
    let alpha = a.get(p, p).re;
    let delta = a.get(q, q).re;

    // tan(2θ) = 2r / (δ - α), taking the smaller root for stability.
    let tau = (delta - alpha) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let cs = Complex64::new(c, 0.0);
    let s_phase = phase * Complex64::new(s, 0.0); // s·e^{iφ}
    let n = a.rows();

    // A <- A·U with U = [[c, s e^{iφ}], [-s e^{-iφ}, c]] on columns (p, q).
    for i in 0..n {
        let aip = a.get(i, p);
        let aiq = a.get(i, q);
        a.set(i, p, aip * cs - aiq * s_phase.conj());
        a.set(i, q, aip * s_phase + aiq * cs);
    }
    // A <- U†·A on rows (p, q).
    for j in 0..n {
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        a.set(p, j, apj * cs - aqj * s_phase);
        a.set(q, j, apj * s_phase.conj() + aqj * cs);
    }
    // V <- V·U accumulates the eigenvector basis.
    for i in 0..n {
        let vip = v.get(i, p);
        let viq = v.get(i, q);
        v.set(i, p, vip * cs - viq * s_phase.conj());
        v.set(i, q, vip * s_phase + viq * cs);
    }

    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    let dp = a.get(p, p);
    let dq = a.get(q, q);
    a.set(p, p, Complex64::new(dp.re, 0.0));
    a.set(q, q, Complex64::new(dq.re, 0.0));
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                acc += a.get(p, q).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Rotates each column so its largest-magnitude entry is real and positive.
fn fix_column_phases(m: &mut ComplexMatrix) {
    for j in 0..m.cols() {
        let mut best = 0usize;
        let mut best_mag = 0.0f64;
        for i in 0..m.rows() {
            let mag = m.get(i, j).norm();
            if mag > best_mag {
                best_mag = mag;
                best = i;
            }
        }
        if best_mag == 0.0 {
            continue;
        }
        let phase = m.get(best, j) / Complex64::new(best_mag, 0.0);
        let corr = phase.conj();
        for i in 0..m.rows() {
            let z = m.get(i, j);
            m.set(i, j, z * corr);
        }
        let pivot = m.get(best, j);
        m.set(best, j, Complex64::new(pivot.re, 0.0));
    }
}

/// Completes a matrix with orthonormal columns to a square unitary,
/// using the default tolerance for the input check.
pub fn complete_to_unitary(r1: &ComplexMatrix) -> Result<ComplexMatrix> {
    complete_to_unitary_with(r1, tol::FACTOR)
}

/// Completes `r1` (orthonormal columns, checked against `tol`) to a unitary
/// whose leading columns equal `r1` exactly.
///
/// The complement is built by Gram–Schmidt over the standard basis, skipping
/// candidates whose residual against the current span falls below a fixed
/// pivot threshold; each accepted vector is orthogonalized twice.
pub fn complete_to_unitary_with(r1: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let n = r1.rows();
    let m = r1.cols();
    if m > n {
        return Err(Error::DimensionMismatch {
            context: "complete_to_unitary",
            expected: format!("at most {n} columns"),
            found: format!("{m}"),
        });
    }
    let defect = r1.isometry_defect();
    if defect > tol * (m as f64).sqrt().max(1.0) {
        return Err(Error::NotIsometry { defect, tol });
    }

    // Columns already accepted, the input ones copied verbatim.
    let mut cols: Vec<Vec<Complex64>> = (0..m)
        .map(|j| (0..n).map(|i| r1.get(i, j)).collect())
        .collect();

    for b in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n];
        v[b] = Complex64::new(1.0, 0.0);
        for _pass in 0..2 {
            for col in &cols {
                let mut proj = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    proj += col[i].conj() * v[i];
                }
                for i in 0..n {
                    v[i] -= proj * col[i];
                }
            }
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < tol::COMPLETION_SKIP {
            continue;
        }
        for z in &mut v {
            *z /= norm;
        }
        cols.push(v);
    }

    if cols.len() != n {
        return Err(Error::CompletionFailed);
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| cols[j][i]))
}
