//! The quantum Chebyshev transform: defining matrix oracle, the explicit
//! circuit, inverse application, and the coefficient-register extension used
//! for sampling a small trained model on a larger register.
//!
//! The transform maps computational basis states `|x_j>` to the tau states
//! at the Chebyshev nodes; on the ancilla-0 block it is exactly the DCT-II
//! matrix. The circuit realizes it as follows (ancilla = qubit 0, input
//! `|0>_a |j>` on `N + 1` qubits, `M = 2^N`):
//!
//! 1. `H` on the ancilla, then a CNOT fan-out from the ancilla onto every
//!    system qubit. This prepares the mirrored pair
//!    `(|j> + |2M-1-j>)/sqrt 2` in full-index terms.
//! 2. QFT on all `N + 1` qubits. The DFT of the mirrored pair lands
//!    `e^{-i pi k/2M} cos(pi k (2j+1)/2M) / sqrt M` on index `k` and the
//!    conjugate-phase partner on index `2M - k` — the DCT-II kernel up to
//!    phases.
//! 3. Permutation block: with the ancilla as control, the partner at
//!    `|1, m>` is moved to `|1, (M - m) mod M>`. Negation mod `M` is a
//!    controlled complement (a second CNOT fan-out) followed by a controlled
//!    increment built from multi-controlled X gates.
//! 4. Phase-adjusting layer: each system qubit of weight `w` receives
//!    `P(pi w / 2M)` plus an ancilla-controlled `P(-pi w / M)`, removing the
//!    twiddle phase `e^{-+ i pi k / 2M}` on the two branches so both carry the
//!    real kernel value.
//! 5. A multi-controlled `RY(pi/2)` on the ancilla for the all-zero system
//!    pattern (X-conjugated controls) pre-compensates the `k = 0` column,
//!    whose partner amplitude is zero, and a final ancilla `H` interferes the
//!    branches: every `k >= 1` pair collapses onto the ancilla-0 branch with
//!    the `sqrt 2` weight of the DCT-II, and the ancilla ends in `|0>`.
//!
//! The constructor checks the assembled circuit against the matrix oracle
//! and fails loudly if the block deviates, so a regression in any
//! sub-block cannot go unnoticed.

use num_complex::Complex64;

use crate::chebmath::{amplitude_weight, dct2_matrix};
use crate::error::{Error, Result};
use crate::simcore::{Circuit, Gate, Statevector};

/// Unitary completion of the transform on `N + 1` qubits: the ancilla-0
/// block is the DCT-II matrix, the ancilla-1 block is the identity (the
/// simplest deterministic completion; the ancilla-1 sector is unconstrained).
#[derive(Debug, Clone)]
pub struct QchtOracle {
    pub n_qubits: usize,
    /// Row-major `2^{N+1} x 2^{N+1}`.
    pub matrix: Vec<Vec<Complex64>>,
}

pub fn qcht_oracle(n_qubits: usize) -> Result<QchtOracle> {
    if !(1..=10).contains(&n_qubits) {
        return Err(Error::Config(format!(
            "system size {} outside 1..=10",
            n_qubits
        )));
    }
    let m = 1usize << n_qubits;
    let dct = dct2_matrix(n_qubits)?;
    let dim = 2 * m;
    let mut matrix = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for k in 0..m {
        for j in 0..m {
            matrix[k][j] = Complex64::new(dct[k][j], 0.0);
        }
    }
    for j in 0..m {
        matrix[m + j][m + j] = Complex64::new(1.0, 0.0);
    }
    Ok(QchtOracle { n_qubits, matrix })
}

const CIRCUIT_TOL: f64 = 1e-9;

/// The Chebyshev-transform circuit on `N + 1` qubits. Verified against the
/// DCT-II oracle on construction; a mismatch beyond 1e-9 is an internal
/// error.
pub fn qcht_circuit(n_qubits: usize) -> Result<Circuit> {
    let circ = qcht_circuit_unchecked(n_qubits)?;
    let report = verify_circuit(n_qubits, &circ)?;
    if report.max_block_deviation > CIRCUIT_TOL || report.max_ancilla_leakage > CIRCUIT_TOL {
        return Err(Error::Internal(format!(
            "Chebyshev transform self-check failed: block deviation {:.3e}, ancilla leakage {:.3e}",
            report.max_block_deviation, report.max_ancilla_leakage
        )));
    }
    Ok(circ)
}

/// Circuit assembly without the oracle self-check (used by the verifier's
/// negative-path mode).
pub fn qcht_circuit_unchecked(n_qubits: usize) -> Result<Circuit> {
    if !(1..=8).contains(&n_qubits) {
        return Err(Error::Config(format!(
            "system size {} outside 1..=8",
            n_qubits
        )));
    }
    let n = n_qubits;
    let m = (1usize << n) as f64;
    let mut circ = Circuit::new(n + 1);

    // mirrored-pair preparation
    circ.push(Gate::h(0));
    for q in 1..=n {
        circ.push(Gate::cnot(0, q));
    }

    // QFT over the full register
    circ.extend(&crate::simcore::qft_circuit(n + 1)?);

    // permutation: on the ancilla-1 branch, system index m -> (M - m) mod M.
    // complement...
    for q in 1..=n {
        circ.push(Gate::cnot(0, q));
    }
    // ...then increment (+1 mod M), MSB-first ripple
    for t in 1..=n {
        let mut controls: Vec<usize> = vec![0];
        controls.extend((t + 1)..=n);
        circ.push(Gate::x(t).with_controls(controls));
    }

    // twiddle-phase removal: weight-w qubit gets P(pi w / 2M) and an
    // ancilla-controlled P(-pi w / M)
    for q in 1..=n {
        let w = (1u64 << (n - q)) as f64;
        let theta = std::f64::consts::PI * w / (2.0 * m);
        circ.push(Gate::p(theta, q));
        circ.push(Gate::p(-2.0 * theta, q).with_controls(vec![0]));
    }

    // k = 0 pre-compensation, then the combining Hadamard
    for q in 1..=n {
        circ.push(Gate::x(q));
    }
    circ.push(Gate::ry(std::f64::consts::FRAC_PI_2, 0).with_controls((1..=n).collect()));
    for q in 1..=n {
        circ.push(Gate::x(q));
    }
    circ.push(Gate::h(0));

    Ok(circ)
}

/// Deviation report for a candidate transform circuit.
#[derive(Debug, Clone, Copy)]
pub struct VerificationReport {
    /// Max entrywise |circuit - DCT-II| over the ancilla-0 block.
    pub max_block_deviation: f64,
    /// Max total ancilla-1 output weight over ancilla-0 basis inputs.
    pub max_ancilla_leakage: f64,
}

/// Compares a circuit's ancilla-0 block against the DCT-II oracle and
/// measures ancilla leakage for every computational ancilla-0 input.
pub fn verify_circuit(n_qubits: usize, circ: &Circuit) -> Result<VerificationReport> {
    let m = 1usize << n_qubits;
    let dct = dct2_matrix(n_qubits)?;
    let mut max_block_deviation: f64 = 0.0;
    let mut max_ancilla_leakage: f64 = 0.0;
    for j in 0..m {
        let mut sv = Statevector::basis_state(n_qubits + 1, j)?;
        sv.apply_circuit(circ)?;
        let amps = sv.amplitudes();
        for k in 0..m {
            let d = (amps[k] - Complex64::new(dct[k][j], 0.0)).norm();
            max_block_deviation = max_block_deviation.max(d);
        }
        let leakage: f64 = amps[m..].iter().map(|a| a.norm_sqr()).sum();
        max_ancilla_leakage = max_ancilla_leakage.max(leakage.sqrt());
    }
    Ok(VerificationReport { max_block_deviation, max_ancilla_leakage })
}

/// Applies the transform circuit (or its inverse) to an `N + 1`-qubit state.
pub fn apply_qcht(state: &mut Statevector, inverse: bool) -> Result<()> {
    if state.n_qubits() < 2 {
        return Err(Error::Usage("state must have an ancilla plus system".into()));
    }
    let circ = qcht_circuit(state.n_qubits() - 1)?;
    if inverse {
        state.apply_circuit(&circ.adjoint())
    } else {
        state.apply_circuit(&circ)
    }
}

/// Re-expresses an `N`-qubit Chebyshev-coefficient state on a larger
/// register: coefficient `k` is rescaled by the weight ratio
/// `w_k^{(N)} / w_k^{(N_target)}` of the tau-state amplitudes, coefficients
/// `k >= 2^N` are zero, and the result is renormalized.
pub fn extend_register(state: &Statevector, n_target: usize) -> Result<Statevector> {
    let n = state.n_qubits();
    if n_target <= n {
        return Err(Error::Usage(format!(
            "target register {} must exceed source {}",
            n_target, n
        )));
    }
    if n_target > 12 {
        return Err(Error::Config(format!("target register {} above 12", n_target)));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_target];
    for (k, &a) in state.amplitudes().iter().enumerate() {
        amps[k] = a * (amplitude_weight(n, k) / amplitude_weight(n_target, k));
    }
    let mut out = Statevector::from_amplitudes(n_target, amps)?;
    out.normalize();
    Ok(out)
}
