//! Analytic Chebyshev machinery: polynomials, node grids, tau-state
//! coefficient vectors, the DCT-II matrix, the node-overlap formula, and the
//! derivative recurrences with their effective generator matrix.
//!
//! A tau state over `N` qubits has (unnormalized) coefficients
//! `w_k T_k(x)` with the zero-frequency weight `w_0 = 2^{-N/2}` and
//! `w_k = 2^{-(N-1)/2}` for `k >= 1`. At the Chebyshev nodes
//! `x_j = cos(pi (2j+1) / 2^{N+1})` these vectors are orthonormal.

use crate::error::{Error, Result};

/// `T_k(x)` by the three-term recurrence `T_{k+1} = 2x T_k - T_{k-1}`,
/// which is stable on `[-1, 1]`. Agrees with `cos(k arccos x)` to ~1e-12.
pub fn chebyshev_t(k: usize, x: f64) -> Result<f64> {
    check_domain(x)?;
    Ok(cheb_t_unchecked(k, x))
}

fn cheb_t_unchecked(k: usize, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = x;
    for _ in 1..k {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `U_k(x)`, second kind, used internally for derivatives via
/// `T_n' = n U_{n-1}`.
fn cheb_u_unchecked(k: usize, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * x;
    for _ in 1..k {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `T_k'(x) = k U_{k-1}(x)`.
pub fn chebyshev_t_prime(k: usize, x: f64) -> Result<f64> {
    check_domain(x)?;
    if k == 0 {
        return Ok(0.0);
    }
    Ok(k as f64 * cheb_u_unchecked(k - 1, x))
}

fn check_domain(x: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x = {} outside [-1, 1]", x)));
    }
    Ok(())
}

fn check_register(n: usize, max: usize) -> Result<()> {
    if n < 1 || n > max {
        return Err(Error::Config(format!(
            "register size {} outside 1..={}",
            n, max
        )));
    }
    Ok(())
}

/// The node set `x_j = cos(pi (2j+1) / 2^{N+1})`, `j = 0 .. 2^N - 1`:
/// strictly decreasing, symmetric about zero, all inside `(-1, 1)`.
#[derive(Debug, Clone)]
pub struct ChebyshevGrid {
    n_qubits: usize,
    nodes: Vec<f64>,
}

impl ChebyshevGrid {
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_register(n_qubits, 12)?;
        let m = 1usize << n_qubits;
        let nodes = (0..m)
            .map(|j| (std::f64::consts::PI * (2 * j + 1) as f64 / (2 * m) as f64).cos())
            .collect();
        Ok(ChebyshevGrid { n_qubits, nodes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, j: usize) -> f64 {
        self.nodes[j]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Nodes with positive value, in grid order (decreasing x). These are
    /// `j = 0 .. 2^{N-1} - 1`.
    pub fn positive_nodes(&self) -> &[f64] {
        &self.nodes[..self.nodes.len() / 2]
    }
}

pub fn chebyshev_nodes(n_qubits: usize) -> Result<ChebyshevGrid> {
    ChebyshevGrid::new(n_qubits)
}

/// Tau-state amplitude weights: `w_0 = 2^{-N/2}`, `w_k = 2^{-(N-1)/2}`.
pub fn amplitude_weight(n_qubits: usize, k: usize) -> f64 {
    if k == 0 {
        0.5f64.powf(n_qubits as f64 / 2.0)
    } else {
        0.5f64.powf((n_qubits as f64 - 1.0) / 2.0)
    }
}

/// Unnormalized tau-state coefficients plus the norm `N(x)`.
#[derive(Debug, Clone)]
pub struct TauState {
    pub n_qubits: usize,
    pub x: f64,
    /// `coefficients[k] = w_k T_k(x)`.
    pub coefficients: Vec<f64>,
    /// `N(x) = (1/2 + sum_{k>=1} T_k(x)^2)^{1/2} / 2^{(N-1)/2}`,
    /// equal to 1 exactly at the Chebyshev nodes.
    pub norm: f64,
}

pub fn tau_state(n_qubits: usize, x: f64) -> Result<TauState> {
    check_register(n_qubits, 12)?;
    check_domain(x)?;
    let m = 1usize << n_qubits;
    let mut coefficients = Vec::with_capacity(m);
    let mut sum_sq = 0.5;
    for k in 0..m {
        let t = cheb_t_unchecked(k, x);
        if k >= 1 {
            sum_sq += t * t;
        }
        coefficients.push(amplitude_weight(n_qubits, k) * t);
    }
    let norm = sum_sq.sqrt() * 0.5f64.powf((n_qubits as f64 - 1.0) / 2.0);
    Ok(TauState { n_qubits, x, coefficients, norm })
}

/// Coefficients of the derivative state: `w_k T_k'(x)` with the same
/// weights as [`tau_state`].
pub fn tau_derivative_coeffs(n_qubits: usize, x: f64) -> Result<Vec<f64>> {
    check_register(n_qubits, 12)?;
    check_domain(x)?;
    let m = 1usize << n_qubits;
    (0..m)
        .map(|k| Ok(amplitude_weight(n_qubits, k) * chebyshev_t_prime(k, x)?))
        .collect()
}

/// `sum_j T_k(x_j) T_l(x_j)` over the `2^N` nodes. Equals `0` for `k != l`,
/// `2^N` for `k = l = 0` and `2^{N-1}` for `k = l != 0`, valid for degrees
/// below `2^N`.
pub fn orthogonality_sum(n_qubits: usize, k: usize, l: usize) -> Result<f64> {
    let grid = ChebyshevGrid::new(n_qubits)?;
    let m = grid.len();
    if k >= m || l >= m {
        return Err(Error::Usage(format!(
            "degrees ({}, {}) must be below 2^N = {}",
            k, l, m
        )));
    }
    Ok(grid
        .nodes()
        .iter()
        .map(|&x| cheb_t_unchecked(k, x) * cheb_t_unchecked(l, x))
        .sum())
}

/// Squared overlap of unnormalized tau states by direct coefficient
/// summation. The oracle for [`overlap_sq_formula`].
pub fn overlap_sq_direct(n_qubits: usize, x_prime: f64, x: f64) -> Result<f64> {
    let a = tau_state(n_qubits, x_prime)?;
    let b = tau_state(n_qubits, x)?;
    let ip: f64 = a
        .coefficients
        .iter()
        .zip(&b.coefficients)
        .map(|(p, q)| p * q)
        .sum();
    Ok(ip * ip)
}

/// Christoffel-Darboux closed form for `|<tau(x')|tau(x)>|^2` with `x'` a
/// Chebyshev node:
///
/// `(T_{M+1}(x') T_M(x) - T_M(x') T_{M+1}(x))^2 / (2^{2N} (x' - x)^2)`
///
/// with `M = 2^N`. The form is 0/0 at `x = x'`; inputs closer than 1e-12
/// branch to the direct summation.
pub fn overlap_sq_formula(n_qubits: usize, x_prime: f64, x: f64) -> Result<f64> {
    check_register(n_qubits, 12)?;
    check_domain(x_prime)?;
    check_domain(x)?;
    if (x - x_prime).abs() < 1e-12 {
        return overlap_sq_direct(n_qubits, x_prime, x);
    }
    let m = 1usize << n_qubits;
    let num = cheb_t_unchecked(m + 1, x_prime) * cheb_t_unchecked(m, x)
        - cheb_t_unchecked(m, x_prime) * cheb_t_unchecked(m + 1, x);
    let denom = (1u64 << (2 * n_qubits)) as f64 * (x_prime - x) * (x_prime - x);
    Ok(num * num / denom)
}

/// Type-II DCT matrix with entries
/// `M[k][j] = 2^{-(N-1)/2} c_k cos(k (j + 1/2) pi / 2^N)`, `c_0 = 1/sqrt 2`,
/// `c_k = 1` otherwise. Orthogonal; column `j` equals the tau-state
/// coefficient vector at node `x_j`.
pub fn dct2_matrix(n_qubits: usize) -> Result<Vec<Vec<f64>>> {
    check_register(n_qubits, 10)?;
    let m = 1usize << n_qubits;
    let scale = 0.5f64.powf((n_qubits as f64 - 1.0) / 2.0);
    let mut rows = vec![vec![0.0; m]; m];
    for k in 0..m {
        let ck = if k == 0 {
            std::f64::consts::FRAC_1_SQRT_2
        } else {
            1.0
        };
        for j in 0..m {
            let angle = k as f64 * (j as f64 + 0.5) * std::f64::consts::PI / m as f64;
            rows[k][j] = scale * ck * angle.cos();
        }
    }
    Ok(rows)
}

/// Linear operator mapping tau-state coefficients to derivative-state
/// coefficients: `G . coeffs(tau(x)) = coeffs(tau'(x))` for every `x`.
#[derive(Debug, Clone)]
pub struct GEffMatrix {
    pub n_qubits: usize,
    /// Row-major `2^N x 2^N`; `entries[out][in]`.
    pub entries: Vec<Vec<f64>>,
}

impl GEffMatrix {
    /// `G . v` for a coefficient vector `v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Builds the effective derivative generator from the expansions
/// `T_{2n}' = 4n sum_{m=1}^{n} T_{2m-1}` and
/// `T_{2n+1}' = (4n+2) sum_{m=1}^{n} T_{2m} + (2n+1) T_0`,
/// rescaled entrywise by `w_out / w_in` to act on weighted coefficients.
/// Row 0 vanishes (`T_0' = 0`) and row `k` draws only on indices below `k`.
pub fn g_eff_matrix(n_qubits: usize) -> Result<GEffMatrix> {
    check_register(n_qubits, 10)?;
    let m = 1usize << n_qubits;
    let mut entries = vec![vec![0.0; m]; m];
    for k in 1..m {
        let wk = amplitude_weight(n_qubits, k);
        if k % 2 == 0 {
            let n = k / 2;
            for mm in 1..=n {
                let idx = 2 * mm - 1;
                entries[k][idx] = 4.0 * n as f64 * wk / amplitude_weight(n_qubits, idx);
            }
        } else {
            let n = (k - 1) / 2;
            for mm in 1..=n {
                let idx = 2 * mm;
                entries[k][idx] =
                    (4.0 * n as f64 + 2.0) * wk / amplitude_weight(n_qubits, idx);
            }
            entries[k][0] = (2.0 * n as f64 + 1.0) * wk / amplitude_weight(n_qubits, 0);
        }
    }
    Ok(GEffMatrix { n_qubits, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn chebyshev_t_examples() {
        assert_eq!(chebyshev_t(0, 0.73).unwrap(), 1.0);
        assert!((chebyshev_t(3, 0.5).unwrap() + 1.0).abs() < 1e-12);
        assert!(chebyshev_t(2, 1.5).is_err());
        // endpoints: T_k(+-1) = (+-1)^k
        for k in 0..10 {
            assert!((chebyshev_t(k, 1.0).unwrap() - 1.0).abs() < 1e-12);
            let expect = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((chebyshev_t(k, -1.0).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn recurrence_matches_cos_arccos_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let x: f64 = rng.gen_range(-1.0..1.0);
            let k = rng.gen_range(0..64usize);
            let oracle = (k as f64 * x.acos()).cos();
            assert!(
                (chebyshev_t(k, x).unwrap() - oracle).abs() < 1e-10,
                "k={} x={}",
                k,
                x
            );
        }
    }

    #[test]
    #[allow(clippy::approx_constant)] // decimals below are hand-checked values
    fn node_grid_examples() {
        let g1 = chebyshev_nodes(1).unwrap();
        assert!((g1.node(0) - (PI / 4.0).cos()).abs() < 1e-15);
        assert!((g1.node(0) - 0.7071067812).abs() < 1e-9);

        let g3 = chebyshev_nodes(3).unwrap();
        assert!((g3.node(7) - (15.0 * PI / 16.0).cos()).abs() < 1e-15);
        assert!((g3.node(7) + 0.9807852804).abs() < 1e-9);

        let g2 = chebyshev_nodes(2).unwrap();
        let sum: f64 = g2.nodes().iter().sum();
        assert!(sum.abs() < 1e-14);

        assert!(chebyshev_nodes(0).is_err());
    }

    #[test]
    fn node_grid_invariants() {
        for n in 1..=6 {
            let g = chebyshev_nodes(n).unwrap();
            let m = g.len();
            for j in 0..m {
                assert!(g.node(j) > -1.0 && g.node(j) < 1.0);
                assert!((g.node(j) + g.node(m - 1 - j)).abs() < 1e-14);
                if j > 0 {
                    assert!(g.node(j) < g.node(j - 1));
                }
            }
            assert_eq!(g.positive_nodes().len(), m / 2);
            assert!(g.positive_nodes().iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    #[allow(clippy::approx_constant)] // decimals below are hand-checked values
    fn tau_state_examples() {
        let node = (PI / 4.0).cos();
        let t = tau_state(1, node).unwrap();
        assert!((t.coefficients[0] - 0.70710678).abs() < 1e-8);
        assert!((t.coefficients[1] - 0.70710678).abs() < 1e-8);
        assert!((t.norm - 1.0).abs() < 1e-12);

        let t0 = tau_state(1, 0.0).unwrap();
        assert!((t0.coefficients[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(t0.coefficients[1].abs() < 1e-15);
        assert!((t0.norm - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);

        assert!(tau_state(2, 1.2).is_err());
    }

    #[test]
    fn tau_norm_is_one_at_all_nodes() {
        for n in 1..=8 {
            let grid = chebyshev_nodes(n).unwrap();
            for &x in grid.nodes() {
                let t = tau_state(n, x).unwrap();
                assert!((t.norm - 1.0).abs() < 1e-12, "n={} x={}", n, x);
                let direct: f64 =
                    t.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
                assert!((direct - t.norm).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn orthogonality_sum_examples() {
        assert!((orthogonality_sum(2, 0, 0).unwrap() - 4.0).abs() < 1e-10);
        assert!((orthogonality_sum(2, 3, 3).unwrap() - 2.0).abs() < 1e-10);
        assert!(orthogonality_sum(3, 2, 5).unwrap().abs() < 1e-10);
        assert!(orthogonality_sum(2, 4, 0).is_err());
    }

    #[test]
    fn gram_matrix_identity_at_nodes() {
        for n in 1..=8 {
            let grid = chebyshev_nodes(n).unwrap();
            let states: Vec<TauState> = grid
                .nodes()
                .iter()
                .map(|&x| tau_state(n, x).unwrap())
                .collect();
            for (i, a) in states.iter().enumerate() {
                for (j, b) in states.iter().enumerate() {
                    let ip: f64 = a
                        .coefficients
                        .iter()
                        .zip(&b.coefficients)
                        .map(|(p, q)| p * q)
                        .sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (ip - expect).abs() < 1e-12,
                        "n={} ({},{}) -> {}",
                        n,
                        i,
                        j,
                        ip
                    );
                }
            }
        }
    }

    #[test]
    fn overlap_formula_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 2..=6 {
            let grid = chebyshev_nodes(n).unwrap();
            for _ in 0..200 {
                let j = rng.gen_range(0..grid.len());
                let x: f64 = rng.gen_range(-1.0..1.0);
                let f = overlap_sq_formula(n, grid.node(j), x).unwrap();
                let d = overlap_sq_direct(n, grid.node(j), x).unwrap();
                assert!((f - d).abs() < 1e-9, "n={} j={} x={}: {} vs {}", n, j, x, f, d);
            }
        }
    }

    #[test]
    fn overlap_formula_node_cases() {
        let grid = chebyshev_nodes(3).unwrap();
        let xp = grid.node(7);
        // other nodes: overlap 0
        for j in 0..7 {
            let v = overlap_sq_formula(3, xp, grid.node(j)).unwrap();
            assert!(v.abs() < 1e-10, "j={} v={}", j, v);
        }
        // same node: branch case, value 1
        let v = overlap_sq_formula(3, xp, xp).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dct2_matrix_examples() {
        // N=1 explicit values
        let m1 = dct2_matrix(1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((m1[0][0] - s).abs() < 1e-12);
        assert!((m1[0][1] - s).abs() < 1e-12);
        assert!((m1[1][0] - s).abs() < 1e-12);
        assert!((m1[1][1] + s).abs() < 1e-12);

        // orthogonality for N = 1..8
        for n in 1..=8 {
            let m = dct2_matrix(n).unwrap();
            let dim = m.len();
            for i in 0..dim {
                for j in 0..dim {
                    let e: f64 = (0..dim).map(|k| m[k][i] * m[k][j]).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((e - expect).abs() < 1e-12, "n={} ({},{})", n, i, j);
                }
            }
        }

        // columns equal tau coefficients at the nodes
        for n in 1..=6 {
            let m = dct2_matrix(n).unwrap();
            let grid = chebyshev_nodes(n).unwrap();
            for j in 0..grid.len() {
                let t = tau_state(n, grid.node(j)).unwrap();
                for k in 0..grid.len() {
                    assert!((m[k][j] - t.coefficients[k]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn derivative_recurrence_identities() {
        // T_2' = 4x
        assert!((chebyshev_t_prime(2, 0.3).unwrap() - 1.2).abs() < 1e-12);
        // T_0' = 0
        assert_eq!(chebyshev_t_prime(0, 0.9).unwrap(), 0.0);
        // T_4'(x) = 8 (T_1 + T_3)
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x: f64 = rng.gen_range(-1.0..1.0);
            let lhs = chebyshev_t_prime(4, x).unwrap();
            let rhs = 8.0 * (chebyshev_t(1, x).unwrap() + chebyshev_t(3, x).unwrap());
            assert!((lhs - rhs).abs() < 1e-10);
        }
        // odd case: T_5' = 10 (T_2 + T_4) + 5 T_0
        for _ in 0..100 {
            let x: f64 = rng.gen_range(-1.0..1.0);
            let lhs = chebyshev_t_prime(5, x).unwrap();
            let rhs = 10.0
                * (chebyshev_t(2, x).unwrap() + chebyshev_t(4, x).unwrap())
                + 5.0;
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn tau_derivative_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = 1e-6;
        for _ in 0..100 {
            let n = rng.gen_range(1..=5usize);
            let x: f64 = rng.gen_range(-0.9..0.9);
            let d = tau_derivative_coeffs(n, x).unwrap();
            let plus = tau_state(n, x + h).unwrap().coefficients;
            let minus = tau_state(n, x - h).unwrap().coefficients;
            for k in 0..d.len() {
                let fd = (plus[k] - minus[k]) / (2.0 * h);
                let scale = d[k].abs().max(1.0);
                assert!(
                    (d[k] - fd).abs() / scale < 1e-6,
                    "n={} k={} x={}: {} vs {}",
                    n,
                    k,
                    x,
                    d[k],
                    fd
                );
            }
        }
    }

    #[test]
    fn g_eff_reproduces_derivative_coeffs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=6 {
            let g = g_eff_matrix(n).unwrap();
            let mut max_err: f64 = 0.0;
            for _ in 0..100 {
                let x: f64 = rng.gen_range(-1.0..1.0);
                let tau = tau_state(n, x).unwrap();
                let got = g.apply(&tau.coefficients);
                let expect = tau_derivative_coeffs(n, x).unwrap();
                for (a, b) in got.iter().zip(&expect) {
                    max_err = max_err.max((a - b).abs());
                }
            }
            assert!(max_err < 1e-10, "n={} max err {}", n, max_err);
        }
    }

    #[test]
    fn g_eff_structure() {
        let g = g_eff_matrix(4).unwrap();
        let m = g.entries.len();
        // row 0 vanishes (T_0' = 0) and support is strictly below the diagonal
        for c in 0..m {
            assert_eq!(g.entries[0][c], 0.0);
        }
        for r in 0..m {
            for c in r..m {
                assert_eq!(g.entries[r][c], 0.0, "({},{})", r, c);
            }
        }
        // odd rows carry a scaled T_0 contribution
        assert!((g.entries[1][0] - 2.0f64.sqrt()).abs() < 1e-15);
    }
}
