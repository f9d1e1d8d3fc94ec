//! Dense statevector simulation: states, gates, circuits, the QFT,
//! inner products and projective measurement sampling.
//!
//! Bit ordering: **qubit 0 is the most significant bit** of the basis-state
//! index. For an `n`-qubit register the basis state `|b_0 b_1 ... b_{n-1}>`
//! has index `sum_q b_q * 2^(n-1-q)`. Every module in this crate uses this
//! convention; an ancilla placed on qubit 0 therefore occupies the top half
//! of the amplitude vector when set to `|1>`.
//!
//! Measurement sampling uses the ChaCha8 generator (`rand_chacha`), seeded
//! from a caller-supplied 64-bit value, so histograms are bit-reproducible
//! across platforms. Independent experiments should use distinct seeds (or
//! distinct ChaCha streams).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 24;

type Mat2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single-target gate kinds. Controls live on [`Gate`], so a controlled-X
/// with one control is a CNOT and the multi-controlled rotations used by the
/// Chebyshev transform are plain gates with longer control lists.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    H,
    X,
    /// Phase shift `P(phi) = diag{1, e^{i phi}}`.
    P(f64),
    /// Scaled phase shift `diag{1, exp(i s 2^n arccos(x) / l)}` used by the
    /// Chebyshev feature map. `n` is the system size the scaling refers to.
    PTilde { s: f64, n: u32, l: f64, x: f64 },
    RX(f64),
    RY(f64),
    RZ(f64),
    /// Arbitrary single-qubit unitary.
    Unitary(Mat2),
}

impl GateKind {
    /// The 2x2 matrix of this gate kind.
    ///
    /// Rotation conventions:
    /// `RZ(t) = diag{e^{-it/2}, e^{it/2}}`,
    /// `RY(t) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]`,
    /// `RX(t) = [[cos t/2, -i sin t/2], [-i sin t/2, cos t/2]]`.
    pub fn matrix(&self) -> Mat2 {
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        match *self {
            GateKind::H => [[c(s2, 0.0), c(s2, 0.0)], [c(s2, 0.0), c(-s2, 0.0)]],
            GateKind::X => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            GateKind::P(phi) => [
                [c(1.0, 0.0), c(0.0, 0.0)],
                [c(0.0, 0.0), Complex64::from_polar(1.0, phi)],
            ],
            GateKind::PTilde { s, n, l, x } => {
                let phi = s * (1u64 << n) as f64 * x.acos() / l;
                [
                    [c(1.0, 0.0), c(0.0, 0.0)],
                    [c(0.0, 0.0), Complex64::from_polar(1.0, phi)],
                ]
            }
            GateKind::RX(t) => {
                let (sn, cs) = (t / 2.0).sin_cos();
                [[c(cs, 0.0), c(0.0, -sn)], [c(0.0, -sn), c(cs, 0.0)]]
            }
            GateKind::RY(t) => {
                let (sn, cs) = (t / 2.0).sin_cos();
                [[c(cs, 0.0), c(-sn, 0.0)], [c(sn, 0.0), c(cs, 0.0)]]
            }
            GateKind::RZ(t) => [
                [Complex64::from_polar(1.0, -t / 2.0), c(0.0, 0.0)],
                [c(0.0, 0.0), Complex64::from_polar(1.0, t / 2.0)],
            ],
            GateKind::Unitary(m) => m,
        }
    }

    /// Kind of the inverse gate.
    pub fn adjoint(&self) -> GateKind {
        match *self {
            GateKind::H => GateKind::H,
            GateKind::X => GateKind::X,
            GateKind::P(phi) => GateKind::P(-phi),
            GateKind::PTilde { s, n, l, x } => GateKind::PTilde { s: -s, n, l, x },
            GateKind::RX(t) => GateKind::RX(-t),
            GateKind::RY(t) => GateKind::RY(-t),
            GateKind::RZ(t) => GateKind::RZ(-t),
            GateKind::Unitary(m) => GateKind::Unitary([
                [m[0][0].conj(), m[1][0].conj()],
                [m[0][1].conj(), m[1][1].conj()],
            ]),
        }
    }
}

/// A single-target gate with an arbitrary (possibly empty) control set.
/// The gate matrix acts on `target` only when every control qubit is `|1>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub controls: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, target: usize) -> Self {
        Gate { kind, target, controls: Vec::new() }
    }

    pub fn with_controls(mut self, controls: Vec<usize>) -> Self {
        self.controls = controls;
        self
    }

    pub fn h(target: usize) -> Self {
        Gate::new(GateKind::H, target)
    }
    pub fn x(target: usize) -> Self {
        Gate::new(GateKind::X, target)
    }
    pub fn p(phi: f64, target: usize) -> Self {
        Gate::new(GateKind::P(phi), target)
    }
    pub fn rx(t: f64, target: usize) -> Self {
        Gate::new(GateKind::RX(t), target)
    }
    pub fn ry(t: f64, target: usize) -> Self {
        Gate::new(GateKind::RY(t), target)
    }
    pub fn rz(t: f64, target: usize) -> Self {
        Gate::new(GateKind::RZ(t), target)
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::new(GateKind::X, target).with_controls(vec![control])
    }

    pub fn adjoint(&self) -> Gate {
        Gate {
            kind: self.kind.adjoint(),
            target: self.target,
            controls: self.controls.clone(),
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.target >= n_qubits {
            return Err(Error::Usage(format!(
                "gate target {} out of range for {} qubits",
                self.target, n_qubits
            )));
        }
        for &ctl in &self.controls {
            if ctl >= n_qubits {
                return Err(Error::Usage(format!(
                    "gate control {} out of range for {} qubits",
                    ctl, n_qubits
                )));
            }
            if ctl == self.target {
                return Err(Error::Usage(format!(
                    "control {} coincides with target",
                    ctl
                )));
            }
        }
        Ok(())
    }
}

/// Dense complex amplitude vector over `n_qubits` qubits.
#[derive(Debug, Clone)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>` on `n` qubits.
    pub fn zero_state(n: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n) {
            return Err(Error::Config(format!(
                "qubit count {} outside 1..={}",
                n, MAX_QUBITS
            )));
        }
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        amps[0] = c(1.0, 0.0);
        Ok(Statevector { n_qubits: n, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis_state(n: usize, index: usize) -> Result<Self> {
        let mut sv = Statevector::zero_state(n)?;
        if index >= sv.amps.len() {
            return Err(Error::Usage(format!("basis index {} out of range", index)));
        }
        sv.amps[0] = c(0.0, 0.0);
        sv.amps[index] = c(1.0, 0.0);
        Ok(sv)
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n) || amps.len() != 1 << n {
            return Err(Error::Usage(format!(
                "amplitude vector length {} does not match {} qubits",
                amps.len(),
                n
            )));
        }
        Ok(Statevector { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    /// Born-rule probabilities `|a_i|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn bit_mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    /// Applies a (controlled) gate in place. Norm is preserved to machine
    /// precision for unitary kinds.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        let m = gate.kind.matrix();
        let tmask = self.bit_mask(gate.target);
        let cmask: usize = gate
            .controls
            .iter()
            .map(|&q| self.bit_mask(q))
            .fold(0, |acc, b| acc | b);
        let dim = self.amps.len();
        for i in 0..dim {
            if i & tmask == 0 && i & cmask == cmask {
                let j = i | tmask;
                let a0 = self.amps[i];
                let a1 = self.amps[j];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits != self.n_qubits {
            return Err(Error::Usage(format!(
                "circuit on {} qubits applied to {}-qubit state",
                circuit.n_qubits, self.n_qubits
            )));
        }
        for g in &circuit.gates {
            self.apply(g)?;
        }
        Ok(())
    }
}

/// `<a|b>` with conjugation on `a`.
pub fn inner_product(a: &Statevector, b: &Statevector) -> Result<Complex64> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::Usage("inner product size mismatch".into()));
    }
    Ok(a.amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Ordered gate list on a fixed register size.
#[derive(Debug, Clone, Default)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit { n_qubits, gates: Vec::new() }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    /// SWAP(a, b) as three CNOTs.
    pub fn push_swap(&mut self, a: usize, b: usize) {
        self.push(Gate::cnot(a, b));
        self.push(Gate::cnot(b, a));
        self.push(Gate::cnot(a, b));
    }

    pub fn extend(&mut self, other: &Circuit) {
        self.gates.extend_from_slice(&other.gates);
    }

    /// Inverse circuit: adjoint gates in reverse order.
    pub fn adjoint(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// Full unitary matrix (column `j` = circuit applied to `|j>`).
    /// Intended for verification at small sizes.
    pub fn matrix(&self) -> Result<Vec<Vec<Complex64>>> {
        let dim = 1usize << self.n_qubits;
        let mut cols = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut sv = Statevector::basis_state(self.n_qubits, j)?;
            sv.apply_circuit(self)?;
            cols.push(sv.amps);
        }
        // transpose to row-major
        let mut rows = vec![vec![c(0.0, 0.0); dim]; dim];
        for (j, col) in cols.iter().enumerate() {
            for (i, &a) in col.iter().enumerate() {
                rows[i][j] = a;
            }
        }
        Ok(rows)
    }
}

/// QFT on `n` qubits, including the terminal bit-reversal swap layer, so the
/// circuit matrix is exactly the DFT `F[j,k] = e^{2 pi i jk / 2^n} / 2^{n/2}`
/// under the crate's qubit-0-is-MSB ordering.
pub fn qft_circuit(n: usize) -> Result<Circuit> {
    if !(1..=12).contains(&n) {
        return Err(Error::Config(format!("QFT size {} outside 1..=12", n)));
    }
    let mut circ = Circuit::new(n);
    for q in 0..n {
        circ.push(Gate::h(q));
        for t in (q + 1)..n {
            let angle = PI / (1u64 << (t - q)) as f64;
            circ.push(Gate::p(angle, q).with_controls(vec![t]));
        }
    }
    for q in 0..n / 2 {
        circ.push_swap(q, n - 1 - q);
    }
    Ok(circ)
}

/// Draws `shots` i.i.d. computational-basis samples from `|a_i|^2`.
/// Deterministic for a fixed seed (ChaCha8, inverse-CDF sampling).
pub fn sample_counts(
    state: &Statevector,
    shots: u64,
    seed: u64,
) -> Result<BTreeMap<usize, u64>> {
    if shots < 1 {
        return Err(Error::Usage("shots must be >= 1".into()));
    }
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Usage(format!(
            "state is not normalized (norm = {})",
            norm
        )));
    }
    let mut cdf = Vec::with_capacity(state.dim());
    let mut acc = 0.0;
    for a in &state.amps {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * total;
        let idx = cdf.partition_point(|&p| p <= u).min(state.dim() - 1);
        *counts.entry(idx).or_insert(0) += 1;
    }
    Ok(counts)
}
