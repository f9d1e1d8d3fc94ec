//! Differentiable quantum generative model: hardware-efficient ansatz,
//! explicit node-basis probability model, analytic x-derivatives,
//! parameter-shift training and computational-basis sampling.
//!
//! The model is `p(x) = |<tau(x)|psi_theta>|^2` with the unnormalized tau
//! coefficients, so the probabilities at the `2^N` Chebyshev nodes sum to
//! one for every `theta`. The phase-map (Fourier) variant replaces the tau
//! coefficients with `e^{2 pi i k x} / 2^{N/2}` and trains on the
//! equidistant grid `{j / 2^N}`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::chebmath::{chebyshev_nodes, g_eff_matrix, tau_derivative_coeffs, tau_state};
use crate::error::{Error, Result};
use crate::qcht;
use crate::simcore::{Circuit, Gate, Statevector};

/// Feature basis the model is built in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Chebyshev,
    Phase,
}

/// Layer structure of the hardware-efficient ansatz: `depth` layers of
/// per-qubit RY then RZ rotations followed by a linear CNOT chain
/// (`i -> i+1`), closed by one final rotation layer without entangler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub depth: usize,
}

impl AnsatzSpec {
    /// `2 N (depth + 1)` angles. Ordering: layer by layer, within a layer
    /// qubit 0 upward, RY before RZ on each qubit; the final rotation layer
    /// comes last.
    pub fn param_count(&self) -> usize {
        2 * self.n_qubits * (self.depth + 1)
    }
}

/// Variational angles plus their ansatz topology.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelParams {
    pub ansatz: AnsatzSpec,
    pub theta: Vec<f64>,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.theta.len() != self.ansatz.param_count() {
            return Err(Error::Usage(format!(
                "expected {} parameters, got {}",
                self.ansatz.param_count(),
                self.theta.len()
            )));
        }
        if self.theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Usage("non-finite parameter".into()));
        }
        Ok(())
    }
}

/// The ansatz as an explicit gate list.
pub fn hea_circuit(params: &ModelParams) -> Result<Circuit> {
    params.validate()?;
    let n = params.ansatz.n_qubits;
    let mut circ = Circuit::new(n);
    let mut it = params.theta.iter();
    for _ in 0..params.ansatz.depth {
        for q in 0..n {
            circ.push(Gate::ry(*it.next().unwrap(), q));
            circ.push(Gate::rz(*it.next().unwrap(), q));
        }
        for q in 0..n.saturating_sub(1) {
            circ.push(Gate::cnot(q, q + 1));
        }
    }
    for q in 0..n {
        circ.push(Gate::ry(*it.next().unwrap(), q));
        circ.push(Gate::rz(*it.next().unwrap(), q));
    }
    Ok(circ)
}

// Allocation-free ansatz evaluation for the training hot path. Matches
// hea_circuit gate for gate.
fn hea_state_into(spec: AnsatzSpec, theta: &[f64], amps: &mut [Complex64]) {
    let n = spec.n_qubits;
    for a in amps.iter_mut() {
        *a = Complex64::new(0.0, 0.0);
    }
    amps[0] = Complex64::new(1.0, 0.0);
    let mut idx = 0;
    for _ in 0..spec.depth {
        for q in 0..n {
            rot_y(amps, n, q, theta[idx]);
            rot_z(amps, n, q, theta[idx + 1]);
            idx += 2;
        }
        for q in 0..n.saturating_sub(1) {
            cnot(amps, n, q, q + 1);
        }
    }
    for q in 0..n {
        rot_y(amps, n, q, theta[idx]);
        rot_z(amps, n, q, theta[idx + 1]);
        idx += 2;
    }
}

fn rot_y(amps: &mut [Complex64], n: usize, q: usize, t: f64) {
    let mask = 1usize << (n - 1 - q);
    let (sn, cs) = (t / 2.0).sin_cos();
    for i in 0..amps.len() {
        if i & mask == 0 {
            let j = i | mask;
            let a0 = amps[i];
            let a1 = amps[j];
            amps[i] = cs * a0 - sn * a1;
            amps[j] = sn * a0 + cs * a1;
        }
    }
}

fn rot_z(amps: &mut [Complex64], n: usize, q: usize, t: f64) {
    let mask = 1usize << (n - 1 - q);
    let ph_lo = Complex64::from_polar(1.0, -t / 2.0);
    let ph_hi = Complex64::from_polar(1.0, t / 2.0);
    for (i, a) in amps.iter_mut().enumerate() {
        *a *= if i & mask == 0 { ph_lo } else { ph_hi };
    }
}

fn cnot(amps: &mut [Complex64], n: usize, control: usize, target: usize) {
    let cmask = 1usize << (n - 1 - control);
    let tmask = 1usize << (n - 1 - target);
    for i in 0..amps.len() {
        if i & cmask != 0 && i & tmask == 0 {
            amps.swap(i, i | tmask);
        }
    }
}

/// `psi_theta = V_theta |0...0>`.
pub fn ansatz_state(params: &ModelParams) -> Result<Statevector> {
    params.validate()?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << params.ansatz.n_qubits];
    hea_state_into(params.ansatz, &params.theta, &mut amps);
    Statevector::from_amplitudes(params.ansatz.n_qubits, amps)
}

fn feature_vector(map: MapKind, n: usize, x: f64) -> Result<Vec<Complex64>> {
    match map {
        MapKind::Chebyshev => Ok(tau_state(n, x)?
            .coefficients
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect()),
        MapKind::Phase => {
            let m = 1usize << n;
            let scale = 1.0 / (m as f64).sqrt();
            // conjugated phase-state coefficients, so the model amplitude is
            // a plain dot product with psi
            Ok((0..m)
                .map(|k| {
                    Complex64::from_polar(
                        scale,
                        -2.0 * std::f64::consts::PI * k as f64 * x,
                    )
                })
                .collect())
        }
    }
}

fn feature_vector_dx(map: MapKind, n: usize, x: f64) -> Result<Vec<Complex64>> {
    match map {
        MapKind::Chebyshev => Ok(tau_derivative_coeffs(n, x)?
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect()),
        MapKind::Phase => {
            let m = 1usize << n;
            let scale = 1.0 / (m as f64).sqrt();
            Ok((0..m)
                .map(|k| {
                    let w = 2.0 * std::f64::consts::PI * k as f64;
                    Complex64::from_polar(scale, -w * x) * Complex64::new(0.0, -w)
                })
                .collect())
        }
    }
}

fn dot(features: &[Complex64], psi: &[Complex64]) -> Complex64 {
    features.iter().zip(psi).map(|(f, a)| f * a).sum()
}

/// `p(x) = |<tau(x)|psi_theta>|^2` (or the phase-map analogue).
pub fn model_prob(map: MapKind, params: &ModelParams, x: f64) -> Result<f64> {
    let psi = ansatz_state(params)?;
    let f = feature_vector(map, params.ansatz.n_qubits, x)?;
    Ok(dot(&f, psi.amplitudes()).norm_sqr())
}

/// Analytic `dp/dx = 2 Re[<tau'(x)|psi><psi|tau(x)>]`, with the derivative
/// coefficients from the polynomial recurrences.
pub fn model_prob_dx(map: MapKind, params: &ModelParams, x: f64) -> Result<f64> {
    let psi = ansatz_state(params)?;
    let f = feature_vector(map, params.ansatz.n_qubits, x)?;
    let fdx = feature_vector_dx(map, params.ansatz.n_qubits, x)?;
    let z = dot(&f, psi.amplitudes());
    let zdx = dot(&fdx, psi.amplitudes());
    Ok(2.0 * (zdx * z.conj()).re)
}

/// Same derivative through the effective generator matrix. Chebyshev map
/// only; cross-checks the direct recurrence path.
pub fn model_prob_dx_geff(params: &ModelParams, x: f64) -> Result<f64> {
    let n = params.ansatz.n_qubits;
    let psi = ansatz_state(params)?;
    let tau = tau_state(n, x)?;
    let g = g_eff_matrix(n)?;
    let dtau = g.apply(&tau.coefficients);
    let f: Vec<Complex64> = tau
        .coefficients
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    let fdx: Vec<Complex64> = dtau.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let z = dot(&f, psi.amplitudes());
    let zdx = dot(&fdx, psi.amplitudes());
    Ok(2.0 * (zdx * z.conj()).re)
}

/// Ground-truth densities the experiments learn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TargetDistribution {
    /// Lognormal density of an asset price at time `t` with drift `mu`,
    /// volatility `sigma` and initial price `s0`.
    Lognormal { mu: f64, sigma: f64, s0: f64, t: f64 },
    /// `P(x) = x` on `[0, 1]`.
    Linear,
}

impl TargetDistribution {
    pub fn validate(&self) -> Result<()> {
        if let TargetDistribution::Lognormal { sigma, s0, t, .. } = self {
            if *sigma <= 0.0 || *s0 <= 0.0 || *t <= 0.0 {
                return Err(Error::Config(
                    "lognormal requires sigma > 0, s0 > 0, t > 0".into(),
                ));
            }
        }
        Ok(())
    }

    /// Unnormalized density value; zero outside the support.
    pub fn density(&self, x: f64) -> f64 {
        match *self {
            TargetDistribution::Lognormal { mu, sigma, s0, t } => {
                if x <= 0.0 {
                    return 0.0;
                }
                let arg = (x / s0).ln() + (mu - sigma * sigma / 2.0) * t;
                let var = sigma * sigma * t;
                (-arg * arg / (2.0 * var)).exp()
                    / (x * sigma * (2.0 * std::f64::consts::PI * t).sqrt())
            }
            TargetDistribution::Linear => {
                if (0.0..=1.0).contains(&x) {
                    x
                } else {
                    0.0
                }
            }
        }
    }
}

pub fn target_density(target: &TargetDistribution, x: f64) -> f64 {
    target.density(x)
}

/// Optimizer choice; the learning rate lives in [`TrainingConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    /// Adam with beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
    #[default]
    Adam,
    /// Plain full-batch gradient descent.
    Gd,
}

/// Full experiment description. Unknown JSON keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingConfig {
    pub qubits: usize,
    pub depth: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    #[serde(default = "default_map")]
    pub map: MapKind,
    pub target: TargetDistribution,
    #[serde(default)]
    pub optimizer: OptimizerKind,
}

fn default_map() -> MapKind {
    MapKind::Chebyshev
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.qubits < 1 || self.qubits > 10 {
            return Err(Error::Config("qubits must be in 1..=10".into()));
        }
        if self.depth < 1 {
            return Err(Error::Config("depth must be >= 1".into()));
        }
        if self.epochs < 1 {
            return Err(Error::Config("epochs must be >= 1".into()));
        }
        if self.learning_rate <= 0.0 || self.learning_rate.is_nan() {
            return Err(Error::Config("learning_rate must be > 0".into()));
        }
        self.target.validate()
    }

    pub fn ansatz(&self) -> AnsatzSpec {
        AnsatzSpec { n_qubits: self.qubits, depth: self.depth }
    }
}

/// A training point: location, normalized target value, and the
/// (conjugated) feature coefficients cached for the optimizer hot loop.
#[derive(Debug, Clone)]
pub struct TrainingPoint {
    pub x: f64,
    pub target: f64,
    features: Vec<Complex64>,
}

/// Training grid plus the normalization constant applied to the raw target.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    pub points: Vec<TrainingPoint>,
    /// Target values were scaled by this constant so the raw density sums
    /// to one over the model's full node grid.
    pub norm_constant: f64,
}

/// Chebyshev grid: positive nodes plus midpoints between consecutive
/// positive nodes, targets scaled so the density sums to one over all `2^N`
/// nodes. Phase grid: `{j/2^N}` plus midpoints, scaled over the full grid.
pub fn build_training_set(config: &TrainingConfig) -> Result<TrainingSet> {
    config.validate()?;
    let n = config.qubits;
    let mut xs: Vec<f64> = Vec::new();
    let norm_constant;
    match config.map {
        MapKind::Chebyshev => {
            let grid = chebyshev_nodes(n)?;
            let total: f64 = grid.nodes().iter().map(|&x| config.target.density(x)).sum();
            if total <= 0.0 || total.is_nan() {
                return Err(Error::Config(
                    "target density vanishes on the node grid".into(),
                ));
            }
            norm_constant = 1.0 / total;
            // positive nodes in increasing x, with midpoints interleaved
            let mut pos: Vec<f64> = grid.positive_nodes().to_vec();
            pos.reverse();
            for i in 0..pos.len() {
                xs.push(pos[i]);
                if i + 1 < pos.len() {
                    xs.push(0.5 * (pos[i] + pos[i + 1]));
                }
            }
        }
        MapKind::Phase => {
            let m = 1usize << n;
            let grid: Vec<f64> = (0..m).map(|j| j as f64 / m as f64).collect();
            let total: f64 = grid.iter().map(|&x| config.target.density(x)).sum();
            if total <= 0.0 || total.is_nan() {
                return Err(Error::Config(
                    "target density vanishes on the phase grid".into(),
                ));
            }
            norm_constant = 1.0 / total;
            for i in 0..m {
                xs.push(grid[i]);
                if i + 1 < m {
                    xs.push(0.5 * (grid[i] + grid[i + 1]));
                }
            }
        }
    }
    let points = xs
        .into_iter()
        .map(|x| {
            Ok(TrainingPoint {
                x,
                target: norm_constant * config.target.density(x),
                features: feature_vector(config.map, n, x)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrainingSet { points, norm_constant })
}

fn probs_into(points: &[TrainingPoint], psi: &[Complex64], out: &mut [f64]) {
    for (p, o) in points.iter().zip(out.iter_mut()) {
        *o = dot(&p.features, psi).norm_sqr();
    }
}

/// Mean squared error of the model against the training targets.
pub fn mse_loss(map: MapKind, params: &ModelParams, set: &TrainingSet) -> Result<f64> {
    if set.points.is_empty() {
        return Err(Error::Usage("empty training set".into()));
    }
    let _ = map;
    let psi = ansatz_state(params)?;
    let mut acc = 0.0;
    for p in &set.points {
        let v = dot(&p.features, psi.amplitudes()).norm_sqr() - p.target;
        acc += v * v;
    }
    Ok(acc / set.points.len() as f64)
}

/// Exact loss gradient via the two-point parameter-shift rule: every ansatz
/// angle sits in an RY/RZ rotation, so
/// `dp/dtheta_i = (p(theta_i + pi/2) - p(theta_i - pi/2)) / 2`, chained
/// through the squared-error derivative.
pub fn grad_theta(map: MapKind, params: &ModelParams, set: &TrainingSet) -> Result<Vec<f64>> {
    let _ = map;
    params.validate()?;
    if set.points.is_empty() {
        return Err(Error::Usage("empty training set".into()));
    }
    let spec = params.ansatz;
    let dim = 1usize << spec.n_qubits;
    let npts = set.points.len();
    let mut theta = params.theta.clone();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    let mut base = vec![0.0; npts];
    let mut plus = vec![0.0; npts];
    let mut minus = vec![0.0; npts];

    hea_state_into(spec, &theta, &mut amps);
    probs_into(&set.points, &amps, &mut base);

    let shift = std::f64::consts::FRAC_PI_2;
    let mut grad = vec![0.0; theta.len()];
    for i in 0..theta.len() {
        let orig = theta[i];
        theta[i] = orig + shift;
        hea_state_into(spec, &theta, &mut amps);
        probs_into(&set.points, &amps, &mut plus);
        theta[i] = orig - shift;
        hea_state_into(spec, &theta, &mut amps);
        probs_into(&set.points, &amps, &mut minus);
        theta[i] = orig;

        let mut g = 0.0;
        for k in 0..npts {
            let dp = (plus[k] - minus[k]) / 2.0;
            g += 2.0 * (base[k] - set.points[k].target) * dp;
        }
        grad[i] = g / npts as f64;
    }
    Ok(grad)
}

/// A trained model with its loss trace.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub map: MapKind,
    pub params: ModelParams,
    pub loss_history: Vec<f64>,
    pub final_loss: f64,
}

/// Full-batch training at the configured rate; deterministic given the
/// seed. Initial angles are uniform on `[-pi/10, pi/10]`.
pub fn train(config: &TrainingConfig) -> Result<TrainedModel> {
    config.validate()?;
    let set = build_training_set(config)?;
    let spec = config.ansatz();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let bound = std::f64::consts::PI / 10.0;
    let theta: Vec<f64> = (0..spec.param_count())
        .map(|_| rng.gen_range(-bound..bound))
        .collect();
    let mut params = ModelParams { ansatz: spec, theta };

    let mut m1 = vec![0.0; params.theta.len()];
    let mut m2 = vec![0.0; params.theta.len()];
    let (beta1, beta2, eps) = (0.9, 0.999, 1e-8);
    let mut loss_history = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        let loss = mse_loss(config.map, &params, &set)?;
        if !loss.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite loss at epoch {}",
                epoch
            )));
        }
        loss_history.push(loss);
        let grad = grad_theta(config.map, &params, &set)?;
        match config.optimizer {
            OptimizerKind::Adam => {
                let t = (epoch + 1) as f64;
                for i in 0..params.theta.len() {
                    m1[i] = beta1 * m1[i] + (1.0 - beta1) * grad[i];
                    m2[i] = beta2 * m2[i] + (1.0 - beta2) * grad[i] * grad[i];
                    let mhat = m1[i] / (1.0 - beta1.powf(t));
                    let vhat = m2[i] / (1.0 - beta2.powf(t));
                    params.theta[i] -= config.learning_rate * mhat / (vhat.sqrt() + eps);
                }
            }
            OptimizerKind::Gd => {
                for i in 0..params.theta.len() {
                    params.theta[i] -= config.learning_rate * grad[i];
                }
            }
        }
    }
    let final_loss = mse_loss(config.map, &params, &set)?;
    if !final_loss.is_finite() {
        return Err(Error::Numerical("non-finite final loss".into()));
    }
    Ok(TrainedModel { map: config.map, params, loss_history, final_loss })
}

/// One sampled node: index, node value, count, empirical frequency and the
/// analytic model probability.
#[derive(Debug, Clone)]
pub struct SampleRow {
    pub index: usize,
    pub x: f64,
    pub count: u64,
    pub frequency: f64,
    pub analytic_prob: f64,
}

/// Samples the trained (Chebyshev-basis) model in the computational basis:
/// prepares `|0>_a (x) psi_theta`, optionally extended to a larger register,
/// applies the inverse Chebyshev transform and measures. Returns one row per
/// node of the sampling register.
pub fn sample_model(
    params: &ModelParams,
    shots: u64,
    extend_to: Option<usize>,
    seed: u64,
) -> Result<Vec<SampleRow>> {
    let psi = ansatz_state(params)?;
    let psi_reg = match extend_to {
        Some(nt) => qcht::extend_register(&psi, nt)?,
        None => psi,
    };
    let n = psi_reg.n_qubits();
    let m = 1usize << n;

    let mut amps = vec![Complex64::new(0.0, 0.0); 2 * m];
    amps[..m].copy_from_slice(psi_reg.amplitudes());
    let mut full = Statevector::from_amplitudes(n + 1, amps)?;
    qcht::apply_qcht(&mut full, true)?;
    let counts: BTreeMap<usize, u64> = crate::simcore::sample_counts(&full, shots, seed)?;
    if counts.keys().any(|&k| k >= m) {
        return Err(Error::Internal(
            "ancilla-1 outcome observed after inverse transform".into(),
        ));
    }

    let grid = chebyshev_nodes(n)?;
    let probs = full.probabilities();
    let rows = (0..m)
        .map(|j| {
            let count = *counts.get(&j).unwrap_or(&0);
            SampleRow {
                index: j,
                x: grid.node(j),
                count,
                frequency: count as f64 / shots as f64,
                analytic_prob: probs[j],
            }
        })
        .collect();
    Ok(rows)
}

/// Analytic node probabilities `|<tau(x_j)|psi>|^2` of a register state.
pub fn node_probabilities(psi: &Statevector) -> Result<Vec<f64>> {
    let n = psi.n_qubits();
    let grid = chebyshev_nodes(n)?;
    grid.nodes()
        .iter()
        .map(|&x| {
            let f = feature_vector(MapKind::Chebyshev, n, x)?;
            Ok(dot(&f, psi.amplitudes()).norm_sqr())
        })
        .collect()
}
