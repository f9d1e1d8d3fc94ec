//! x-parameterized feature-map circuits: the orthonormal Chebyshev map
//! (ancilla + post-selection) and the phase-map baseline.
//!
//! The Chebyshev map prepares, on `N + 1` qubits with the ancilla on
//! qubit 0, a state whose ancilla-0 branch is proportional to the
//! unnormalized tau state. The construction:
//!
//! 1. Hadamards on the ancilla and every system qubit.
//! 2. An unconditional layer of scaled phase gates giving basis state `|k>`
//!    the phase `e^{i k arccos x}`.
//! 3. The same layer with scale `-2`, controlled on the ancilla, so the
//!    ancilla-1 branch carries `e^{-i k arccos x}` instead.
//! 4. A closing ancilla Hadamard interferes the exponent pair into
//!    `cos(k arccos x) = T_k(x)` on the ancilla-0 branch.
//! 5. A reflection-style block about `|0...0>`: system X gates, a
//!    multi-controlled `RY(pi/2)` on the ancilla, system X gates. Within the
//!    `k = 0` subspace the ancilla-0 amplitude at this point is real with a
//!    zero ancilla-1 partner, and `RY(pi/2)` maps `(1, 0) -> (1, 1)/sqrt 2`,
//!    scaling the surviving `T_0` amplitude by exactly `1/sqrt 2` — the
//!    weight asymmetry of the tau state. The angle is fixed (x-independent).
//!
//! The ancilla-0 branch ends as `tau(x) / sqrt 2`, so the post-selection
//! success probability is `N(x)^2 / 2`.

use crate::chebmath::TauState;
use crate::error::{Error, Result};
use crate::simcore::{Circuit, Gate, GateKind, Statevector};

/// Feature-map family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMapKind {
    /// Orthonormal Chebyshev map, `|x| <= 1`, uses an ancilla.
    Chebyshev,
    /// Phase (Fourier) map, `x` in `[0, 1)`, no ancilla.
    Phase,
}

/// Result of running the Chebyshev map and projecting the ancilla onto 0.
#[derive(Debug, Clone)]
pub struct PostSelectedState {
    /// Normalized `N`-qubit system state.
    pub state: Statevector,
    /// Squared norm of the ancilla-0 branch before renormalization.
    pub success_probability: f64,
}

fn check_x_chebyshev(x: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {} outside [-1, 1]", x)));
    }
    Ok(())
}

/// The Chebyshev feature-map circuit on `N + 1` qubits (ancilla = qubit 0).
/// The binding contract is that the ancilla-0 branch of the output on
/// `|0>^{N+1}` is proportional to the tau state at `x`.
pub fn chebyshev_feature_map_circuit(n_qubits: usize, x: f64) -> Result<Circuit> {
    if !(1..=10).contains(&n_qubits) {
        return Err(Error::Config(format!(
            "system size {} outside 1..=10",
            n_qubits
        )));
    }
    check_x_chebyshev(x)?;
    let n = n_qubits;
    let mut circ = Circuit::new(n + 1);

    circ.push(Gate::h(0));
    for q in 1..=n {
        circ.push(Gate::h(q));
    }

    // System qubit q holds bit weight 2^(n-q); the scale divisor l = 2^q
    // makes the per-qubit phase s * weight * arccos(x).
    for q in 1..=n {
        let l = (1u64 << q) as f64;
        circ.push(Gate::new(
            GateKind::PTilde { s: 1.0, n: n as u32, l, x },
            q,
        ));
    }
    for q in 1..=n {
        let l = (1u64 << q) as f64;
        circ.push(
            Gate::new(GateKind::PTilde { s: -2.0, n: n as u32, l, x }, q)
                .with_controls(vec![0]),
        );
    }

    circ.push(Gate::h(0));

    // zero-state reflection block fixing the T_0 weight
    for q in 1..=n {
        circ.push(Gate::x(q));
    }
    circ.push(Gate::ry(std::f64::consts::FRAC_PI_2, 0).with_controls((1..=n).collect()));
    for q in 1..=n {
        circ.push(Gate::x(q));
    }

    Ok(circ)
}

/// Runs the Chebyshev map on `|0>^{N+1}`, projects the ancilla onto 0 and
/// renormalizes. Exact projection, no sampling.
pub fn prepare_tau_tilde(n_qubits: usize, x: f64) -> Result<PostSelectedState> {
    let circ = chebyshev_feature_map_circuit(n_qubits, x)?;
    let mut sv = Statevector::zero_state(n_qubits + 1)?;
    sv.apply_circuit(&circ)?;
    project_ancilla_zero(&sv)
}

/// Projects qubit 0 onto `|0>` and renormalizes the remaining register.
/// With the MSB ordering the ancilla-0 branch is the first half of the
/// amplitude vector.
pub fn project_ancilla_zero(sv: &Statevector) -> Result<PostSelectedState> {
    let n = sv.n_qubits();
    if n < 2 {
        return Err(Error::Usage("need at least one system qubit".into()));
    }
    let half = sv.dim() / 2;
    let branch = &sv.amplitudes()[..half];
    let success_probability: f64 = branch.iter().map(|a| a.norm_sqr()).sum();
    if success_probability < 1e-12 {
        return Err(Error::Numerical(
            "ancilla-0 branch has vanishing weight".into(),
        ));
    }
    let scale = success_probability.sqrt();
    let amps = branch.iter().map(|a| a / scale).collect();
    Ok(PostSelectedState {
        state: Statevector::from_amplitudes(n - 1, amps)?,
        success_probability,
    })
}

/// The analytic normalized tau state as a statevector; the oracle the
/// circuit is tested against.
pub fn tau_tilde_statevector(tau: &TauState) -> Result<Statevector> {
    let amps = tau
        .coefficients
        .iter()
        .map(|&v| num_complex::Complex64::new(v / tau.norm, 0.0))
        .collect();
    Statevector::from_amplitudes(tau.n_qubits, amps)
}

/// Phase (Fourier) feature map on `N` qubits: Hadamards followed by
/// `P(2 pi 2^{N-1-j} x)` on qubit `j`, preparing
/// `2^{-N/2} sum_k e^{2 pi i k x} |k>`. Orthonormal on the grid `{j / 2^N}`.
pub fn phase_feature_map_circuit(n_qubits: usize, x: f64) -> Result<Circuit> {
    if !(1..=10).contains(&n_qubits) {
        return Err(Error::Config(format!(
            "system size {} outside 1..=10",
            n_qubits
        )));
    }
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {} outside [0, 1)", x)));
    }
    let mut circ = Circuit::new(n_qubits);
    for q in 0..n_qubits {
        circ.push(Gate::h(q));
    }
    for q in 0..n_qubits {
        let weight = (1u64 << (n_qubits - 1 - q)) as f64;
        circ.push(Gate::p(2.0 * std::f64::consts::PI * weight * x, q));
    }
    Ok(circ)
}
