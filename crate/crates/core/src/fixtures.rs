//! Built-in correctable instances, a random instance generator, and a
//! brute-force round-trip oracle.
//!
//! All randomness flows from an explicit 64-bit seed through ChaCha8
//! ([`seeded_rng`]), so every generated instance and every oracle run is
//! reproducible across platforms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::{CodeIsometry, QuantumChannel};
use crate::error::{Error, Result};
use crate::factor::complete_to_unitary;
use crate::kl::verify_correctable;
use crate::mat::ComplexMatrix;
use crate::recovery::build_recovery;
use crate::tol;

/// A channel together with a code that is known to be correctable for it.
#[derive(Debug, Clone)]
pub struct CorrectableInstance {
    pub channel: QuantumChannel,
    pub code: CodeIsometry,
    /// Analytic ancilla state, when one is known.
    pub expected_xi: Option<ComplexMatrix>,
    pub label: String,
}

/// The deterministic generator behind every random fixture.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| if i != j { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

/// cos(t)·I + i·sin(t)·σ_x, the x-rotation appearing in the rotation-error
/// channel.
fn x_rotation(t: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| {
        if i == j {
            c(t.cos(), 0.0)
        } else {
            c(0.0, t.sin())
        }
    })
}

fn kron3(a: &ComplexMatrix, b: &ComplexMatrix, d: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b).kron(d)
}

fn check_probabilities(p: &[f64]) -> Result<()> {
    if p.iter().any(|&x| x < 0.0) {
        return Err(Error::InvalidProbabilities {
            reason: format!("negative entry in {p:?}"),
        });
    }
    let sum: f64 = p.iter().sum();
    if sum > 1.0 + 1e-12 {
        return Err(Error::InvalidProbabilities {
            reason: format!("sum {sum} exceeds 1"),
        });
    }
    Ok(())
}

/// Mixed-unitary channel Φ(ρ) = (ρ + UρU†)/2 with U = diag(1, -1, i, -i),
/// and the 2-dimensional code spanned by (|00⟩+|01⟩)/√2 and (|10⟩+|11⟩)/√2.
///
/// The error-operator algebra of this channel is the full diagonal algebra,
/// so it admits no non-trivial noiseless subsystem, yet the code is
/// correctable with ancilla state ξ = I₂/2.
pub fn example1() -> CorrectableInstance {
    let s = 0.5f64.sqrt();
    let u = ComplexMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)]);
    let channel = QuantumChannel::new(vec![ComplexMatrix::identity(4).scaled(s), u.scaled(s)])
        .expect("static Kraus list");
    let w = ComplexMatrix::from_fn(4, 2, |i, j| match (i, j) {
        (0, 0) | (1, 0) | (2, 1) | (3, 1) => c(s, 0.0),
        _ => c(0.0, 0.0),
    });
    let code = CodeIsometry::new(w).expect("static isometry");
    CorrectableInstance {
        channel,
        code,
        expected_xi: Some(ComplexMatrix::diag_real(&[0.5, 0.5])),
        label: "example1".into(),
    }
}

/// Closed-form recovery unitary for [`example1`]:
/// (1/√2)·[[1,0,1,0],[1,0,-1,0],[0,1,0,i],[0,1,0,-i]].
pub fn phase_mix_recovery_unitary() -> ComplexMatrix {
    let s = 0.5f64.sqrt();
    ComplexMatrix::new(
        4,
        4,
        vec![
            c(s, 0.0), c(0.0, 0.0), c(s, 0.0), c(0.0, 0.0),
            c(s, 0.0), c(0.0, 0.0), c(-s, 0.0), c(0.0, 0.0),
            c(0.0, 0.0), c(s, 0.0), c(0.0, 0.0), c(0.0, s),
            c(0.0, 0.0), c(s, 0.0), c(0.0, 0.0), c(0.0, -s),
        ],
    )
    .expect("static matrix")
}

/// Three-qubit bit-flip channel with flip probabilities `p = (p₀, p₁, p₂, p₃)`
/// (identity, flip on qubit 1, 2, 3), on the repetition code spanned by
/// |000⟩ and |111⟩. Requires p_j ≥ 0 and Σ p_j ≤ 1; strict inequality gives
/// a sub-normalized channel.
pub fn example2(p: [f64; 4]) -> Result<CorrectableInstance> {
    check_probabilities(&p)?;
    let id2 = ComplexMatrix::identity(2);
    let x = pauli_x();
    let kraus = vec![
        kron3(&id2, &id2, &id2).scaled(p[0].sqrt()),
        kron3(&x, &id2, &id2).scaled(p[1].sqrt()),
        kron3(&id2, &x, &id2).scaled(p[2].sqrt()),
        kron3(&id2, &id2, &x).scaled(p[3].sqrt()),
    ];
    let channel = QuantumChannel::new(kraus)?;
    let mut w = ComplexMatrix::zeros(8, 2);
    w.set(0, 0, c(1.0, 0.0));
    w.set(7, 1, c(1.0, 0.0));
    let code = CodeIsometry::new(w)?;

    let mut sorted = p;
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite probabilities"));
    Ok(CorrectableInstance {
        channel,
        code,
        expected_xi: Some(ComplexMatrix::diag_real(&sorted)),
        label: format!("example2(p={p:?})"),
    })
}

/// Closed-form recovery permutation for [`example2`] with descending
/// probabilities: maps the flip images of the codewords back onto the
/// leading ancilla-ordered basis.
pub fn bit_flip_recovery_permutation() -> ComplexMatrix {
    let mut r = ComplexMatrix::zeros(8, 8);
    for (i, j) in [(0, 0), (1, 6), (2, 4), (3, 3), (4, 2), (5, 5), (6, 7), (7, 1)] {
        r.set(i, j, c(1.0, 0.0));
    }
    r
}

/// Rotation-error channel: each qubit of the three-qubit space is rotated by
/// exp(i·t_a·σ_x) with probability p̃_a. Its error operators are linear
/// combinations of the bit-flip operators of [`example2`], so a bit-flip
/// recovery plan extends to it.
pub fn example3(p_tilde: [f64; 4], t: [f64; 3]) -> Result<QuantumChannel> {
    check_probabilities(&p_tilde)?;
    let id2 = ComplexMatrix::identity(2);
    let kraus = vec![
        kron3(&id2, &id2, &id2).scaled(p_tilde[0].sqrt()),
        kron3(&x_rotation(t[0]), &id2, &id2).scaled(p_tilde[1].sqrt()),
        kron3(&id2, &x_rotation(t[1]), &id2).scaled(p_tilde[2].sqrt()),
        kron3(&id2, &id2, &x_rotation(t[2])).scaled(p_tilde[3].sqrt()),
    ];
    QuantumChannel::new(kraus)
}

/// Analytic ancilla state produced when a descending-probability bit-flip
/// plan is extended to the rotation channel [`example3`]:
/// diagonal p̃₀ + Σ_a p̃_a cos²t_a followed by p̃_a sin²t_a, with
/// ∓i·p̃_a·cos t_a·sin t_a couplings to the first row/column.
pub fn rotation_channel_xi(p_tilde: [f64; 4], t: [f64; 3]) -> ComplexMatrix {
    let mut xi = ComplexMatrix::zeros(4, 4);
    let head: f64 =
        p_tilde[0] + (0..3).map(|a| p_tilde[a + 1] * t[a].cos().powi(2)).sum::<f64>();
    xi.set(0, 0, c(head, 0.0));
    for a in 0..3 {
        let cross = p_tilde[a + 1] * t[a].cos() * t[a].sin();
        xi.set(0, a + 1, c(0.0, -cross));
        xi.set(a + 1, 0, c(0.0, cross));
        xi.set(a + 1, a + 1, c(p_tilde[a + 1] * t[a].sin().powi(2), 0.0));
    }
    xi
}

/// Standard complex Gaussian matrix (independent N(0,1) real and imaginary
/// parts).
pub fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-like random isometry: Gaussian columns orthonormalized by modified
/// Gram–Schmidt with one re-orthogonalization pass.
pub fn random_isometry(n: usize, k: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    assert!(k <= n, "isometry needs k <= n");
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    while cols.len() < k {
        let mut v: Vec<Complex64> =
            (0..n).map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        for _pass in 0..2 {
            for col in &cols {
                let mut proj = c(0.0, 0.0);
                for i in 0..n {
                    proj += col[i].conj() * v[i];
                }
                for i in 0..n {
                    v[i] -= proj * col[i];
                }
            }
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue; // essentially impossible, but redraw rather than divide by ~0
        }
        for z in &mut v {
            *z /= norm;
        }
        cols.push(v);
    }
    ComplexMatrix::from_fn(n, k, |i, j| cols[j][i])
}

/// Haar-like random unitary.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    random_isometry(n, n, rng)
}

/// Haar-random pure state |ψ⟩⟨ψ| on a k-dimensional space.
pub fn random_pure_state(k: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let v = random_isometry(k, 1, rng);
    &v * &v.dagger()
}

/// Random mixed state GG†/tr(GG†) with G a k×k standard complex Gaussian.
pub fn random_mixed_state(k: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = random_matrix(k, k, rng);
    let gg = &g * &g.dagger();
    let tr = gg.trace().re;
    gg.scaled(1.0 / tr)
}

/// Random correctable instance with trace-preserving Kraus operators.
///
/// Construction: fix a random code isometry W, draw a random n×qk isometry
/// and split it into q blocks A_j with mutually orthogonal ranges, draw
/// positive weights p_j summing to 1, and set F_j = √p_j·V_j where V_j is a
/// unitary mapping range(W) onto range(A_j) and the complement onto the
/// complement of range(A_j). Then W†F_i†F_jW = p_j δ_ij I_k exactly, so
/// Λ = diag(p), and Σ F_j†F_j = I.
pub fn random_correctable(n: usize, k: usize, q: usize, seed: u64) -> Result<CorrectableInstance> {
    random_correctable_with(n, k, q, seed, true)
}

/// [`random_correctable`] with the trace-preserving completion optional.
/// Without it the Kraus operators act as √p_j·A_jW†, annihilating the
/// complement of the code; the instance is still correctable but the
/// channel is sub-normalized on most inputs.
pub fn random_correctable_with(
    n: usize,
    k: usize,
    q: usize,
    seed: u64,
    trace_preserving: bool,
) -> Result<CorrectableInstance> {
    if q == 0 || k == 0 || q * k > n {
        return Err(Error::DimensionMismatch {
            context: "random_correctable",
            expected: "q ≥ 1, k ≥ 1 and q·k ≤ n".into(),
            found: format!("n={n}, k={k}, q={q}"),
        });
    }
    let mut rng = seeded_rng(seed);
    let w = random_isometry(n, k, &mut rng);
    let images = random_isometry(n, q * k, &mut rng);

    let mut p: Vec<f64> = (0..q).map(|_| 0.2 + 0.8 * rng.random::<f64>()).collect();
    let total: f64 = p.iter().sum();
    for x in &mut p {
        *x /= total;
    }

    let w_full = complete_to_unitary(&w)?;
    let w_complement = w_full.block(0, k, n, n - k);

    let mut kraus = Vec::with_capacity(q);
    for j in 0..q {
        let a_j = images.block(0, j * k, n, k);
        let code_part = &a_j * &w.dagger();
        let f_j = if trace_preserving {
            let a_full = complete_to_unitary(&a_j)?;
            let d_j = a_full.block(0, k, n, n - k);
            let shuffle = random_unitary(n - k, &mut rng);
            let complement_part = &(&d_j * &shuffle) * &w_complement.dagger();
            (&code_part + &complement_part).scaled(p[j].sqrt())
        } else {
            code_part.scaled(p[j].sqrt())
        };
        kraus.push(f_j);
    }

    let channel = QuantumChannel::new(kraus)?;
    let code = CodeIsometry::new(w)?;
    let mut sorted = p.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite weights"));
    Ok(CorrectableInstance {
        channel,
        code,
        expected_xi: Some(ComplexMatrix::diag_real(&sorted)),
        label: format!("random(n={n}, k={k}, q={q}, seed={seed}, tp={trace_preserving})"),
    })
}

/// Brute-force round-trip check, deliberately independent of the plan
/// internals: the noisy state is produced by direct Kraus summation, the
/// decode step uses only R and W (the ancilla trace is an explicit index
/// sum and the output is normalized by its own trace rather than by γ).
/// Returns the worst Frobenius discrepancy over all trials, alternating
/// Haar-random pure and random mixed data states.
pub fn oracle_roundtrip(inst: &CorrectableInstance, trials: usize, seed: u64) -> Result<f64> {
    let report = verify_correctable(&inst.channel, &inst.code, tol::CORRECTABLE)?;
    let plan = build_recovery(&inst.channel, &inst.code, &report)?;
    let w = inst.code.w();
    let k = inst.code.code_dim();
    let q = plan.q;
    let r_dag = plan.r_unitary.dagger();

    let mut rng = seeded_rng(seed);
    let mut worst = 0.0f64;
    for trial in 0..trials {
        let data = if trial % 2 == 0 {
            random_pure_state(k, &mut rng)
        } else {
            random_mixed_state(k, &mut rng)
        };
        let encoded = &(w * &data) * &w.dagger();
        let mut noisy = ComplexMatrix::zeros(inst.channel.dim(), inst.channel.dim());
        for f in inst.channel.kraus() {
            noisy = &noisy + &(&(f * &encoded) * &f.dagger());
        }
        let rotated = &(&r_dag * &noisy) * &plan.r_unitary;

        let mut decoded = ComplexMatrix::zeros(k, k);
        for a in 0..q {
            for i in 0..k {
                for j in 0..k {
                    let z = decoded.get(i, j) + rotated.get(a * k + i, a * k + j);
                    decoded.set(i, j, z);
                }
            }
        }
        let tr = decoded.trace().re;
        let decoded = decoded.scaled(1.0 / tr);

        let err = decoded.dist(&data);
        if err > worst {
            worst = err;
        }
    }
    Ok(worst)
}
