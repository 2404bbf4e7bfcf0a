//! Pauli tensor expansion and coherent (generalized Bloch) vectors.
//!
//! An `m`-qubit density matrix is written as
//! `rho = 2^-m * sum_mu a_mu sigma^mu1 (x) ... (x) sigma^mum` with real
//! coefficients `a_mu = Tr(rho sigma^mu)`. The coherent vector uses the
//! basis `lambda_mu = 2^-(m-1)/2 sigma^mu` (all-zero index excluded), which
//! satisfies `Tr(lambda_s lambda_t) = 2 delta_st`, so a pure state has
//! `|xi|^2 = 2 (1 - 2^-m)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statecore::{
    purity, CMatrix, DensityMatrix, PureState, QubitLabel, MAX_DENSITY_QUBITS, TOL,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// `sigma^0 = I`, `sigma^1 = X`, `sigma^2 = Y`, `sigma^3 = Z`.
pub fn pauli(mu: usize) -> [[Complex64; 2]; 2] {
    match mu {
        0 => [[ONE, ZERO], [ZERO, ONE]],
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => panic!("Pauli index {mu} out of range"),
    }
}

/// Dense `sigma^mu1 (x) ... (x) sigma^mum`.
pub fn pauli_product(mu: &[usize]) -> CMatrix {
    mu.iter().fold(CMatrix::from_element(1, 1, ONE), |acc, &k| {
        let p = pauli(k);
        let p = CMatrix::from_fn(2, 2, |r, c| p[r][c]);
        acc.kronecker(&p)
    })
}

/// Base-4 digits of a flat multi-index, most significant first.
pub fn multi_index(flat: usize, m: usize) -> Vec<usize> {
    (0..m).map(|q| flat >> (2 * (m - 1 - q)) & 3).collect()
}

fn flat_index(mu: &[usize]) -> usize {
    mu.iter().fold(0, |acc, &k| acc << 2 | k)
}

/// Real coefficient tensor `a_{mu1...mum}`, stored flat with `mu1` most
/// significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTensor {
    n: usize,
    coeffs: Vec<f64>,
}

impl PauliTensor {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn get(&self, mu: &[usize]) -> f64 {
        assert_eq!(mu.len(), self.n, "multi-index length");
        self.coeffs[flat_index(mu)]
    }

    /// Rebuilds `rho = 2^-n sum a_mu sigma^mu`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = 1usize << self.n;
        let mut acc = CMatrix::zeros(d, d);
        let scale = 1.0 / d as f64;
        for (flat, &a) in self.coeffs.iter().enumerate() {
            if a != 0.0 {
                acc += pauli_product(&multi_index(flat, self.n)) * Complex64::new(a * scale, 0.0);
            }
        }
        acc
    }

    /// Tensor with qubit slots reordered so that new slot `k` holds old slot
    /// `order[k]` (zero-based).
    pub fn permute_slots(&self, order: &[usize]) -> PauliTensor {
        assert_eq!(order.len(), self.n);
        let mut coeffs = vec![0.0; self.coeffs.len()];
        for (flat, &a) in self.coeffs.iter().enumerate() {
            let mu = multi_index(flat, self.n);
            let permuted: Vec<usize> = order.iter().map(|&o| mu[o]).collect();
            coeffs[flat_index(&permuted)] = a;
        }
        PauliTensor { n: self.n, coeffs }
    }
}

/// Coefficients against all `4^m` Pauli products.
///
/// The matrix is viewed as a tensor with one 4-valued axis per qubit
/// (`2 * row_bit + col_bit`); a fixed 4x4 map applied along each axis turns
/// those into Pauli coefficients, for `O(m 4^m)` total work.
pub fn pauli_expand(rho: &DensityMatrix) -> Result<PauliTensor> {
    let m = rho.qubits();
    let d = rho.dim();
    let mat = rho.matrix();
    let mut buf = vec![ZERO; d * d];
    for r in 0..d {
        for c in 0..d {
            let mut idx = 0;
            for q in 0..m {
                let shift = m - 1 - q;
                let pair = (r >> shift & 1) << 1 | (c >> shift & 1);
                idx = idx << 2 | pair;
            }
            buf[idx] = mat[(r, c)];
        }
    }
    // Tr(rho sigma) for one qubit from (rho00, rho01, rho10, rho11):
    // I: rho00 + rho11, X: rho01 + rho10, Y: i(rho01 - rho10), Z: rho00 - rho11.
    for q in 0..m {
        let stride = 1usize << (2 * (m - 1 - q));
        for base in 0..buf.len() {
            if !(base / stride).is_multiple_of(4) {
                continue;
            }
            let v: [Complex64; 4] = std::array::from_fn(|k| buf[base + k * stride]);
            buf[base] = v[0] + v[3];
            buf[base + stride] = v[1] + v[2];
            buf[base + 2 * stride] = I * (v[1] - v[2]);
            buf[base + 3 * stride] = v[0] - v[3];
        }
    }
    let worst = buf.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if worst > TOL {
        return Err(Error::NonHermitian(worst));
    }
    Ok(PauliTensor {
        n: m,
        coeffs: buf.into_iter().map(|z| z.re).collect(),
    })
}

/// `Tr(rho sigma^mu)` evaluated directly, one Pauli product at a time.
pub fn pauli_expectation(rho: &DensityMatrix, mu: &[usize]) -> Complex64 {
    let m = rho.qubits();
    assert_eq!(mu.len(), m, "multi-index length");
    let mat = rho.matrix();
    let paulis: Vec<_> = mu.iter().map(|&k| pauli(k)).collect();
    let mut acc = ZERO;
    // Pauli products are monomial: column r of sigma^mu has one nonzero row.
    let flip = mu
        .iter()
        .enumerate()
        .filter(|(_, &k)| k == 1 || k == 2)
        .fold(0usize, |f, (q, _)| f | 1 << (m - 1 - q));
    for r in 0..rho.dim() {
        let c = r ^ flip;
        let mut w = ONE;
        for (q, p) in paulis.iter().enumerate() {
            let shift = m - 1 - q;
            w *= p[c >> shift & 1][r >> shift & 1];
        }
        // Tr(rho P) = sum_{r,c} rho[r,c] P[c,r]
        acc += mat[(r, c)] * w;
    }
    acc
}

/// Coherent vector of an `m`-qubit reduced state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentVector {
    m: usize,
    components: Vec<f64>,
}

impl CoherentVector {
    pub fn qubits(&self) -> usize {
        self.m
    }

    /// Components in lexicographic multi-index order, all-zero index skipped.
    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn norm_sq(&self) -> f64 {
        self.components.iter().map(|x| x * x).sum()
    }

    /// Upper bound `2 (1 - 2^-m)`, attained exactly by pure states.
    pub fn max_norm_sq(&self) -> f64 {
        max_norm_sq(self.m)
    }

    /// Multi-index of component `s`.
    pub fn index_of(&self, s: usize) -> Vec<usize> {
        multi_index(s + 1, self.m)
    }
}

pub fn max_norm_sq(m: usize) -> f64 {
    2.0 * (1.0 - 0.5f64.powi(m as i32))
}

fn coherent_scale(m: usize) -> f64 {
    0.5f64.powf((m as f64 - 1.0) / 2.0)
}

pub fn coherent_vector(rho: &DensityMatrix) -> Result<CoherentVector> {
    let m = rho.qubits();
    if m > MAX_DENSITY_QUBITS {
        return Err(Error::TooManyQubits {
            n: m,
            max: MAX_DENSITY_QUBITS,
        });
    }
    let tensor = pauli_expand(rho)?;
    let scale = coherent_scale(m);
    Ok(CoherentVector {
        m,
        components: tensor.coeffs[1..].iter().map(|a| a * scale).collect(),
    })
}

/// Same vector as [`coherent_vector`], computed component by component as
/// `Tr(rho lambda_mu)`.
pub fn coherent_vector_by_trace(rho: &DensityMatrix) -> Result<CoherentVector> {
    let m = rho.qubits();
    if m > MAX_DENSITY_QUBITS {
        return Err(Error::TooManyQubits {
            n: m,
            max: MAX_DENSITY_QUBITS,
        });
    }
    let scale = coherent_scale(m);
    let components = (1..1usize << (2 * m))
        .map(|flat| pauli_expectation(rho, &multi_index(flat, m)).re * scale)
        .collect();
    Ok(CoherentVector { m, components })
}

/// `|xi|^2 = 2 (Tr rho^2 - 2^-m)`.
pub fn coherent_norm_sq(rho: &DensityMatrix) -> f64 {
    2.0 * (purity(rho) - 0.5f64.powi(rho.qubits() as i32))
}

/// Bloch vector of one qubit, read off the amplitudes without building any
/// density matrix.
pub fn polarized_vector(state: &PureState, part: QubitLabel) -> Result<CoherentVector> {
    part.check(state.n())?;
    let bit = part.bit(state.n());
    let amps = state.amplitudes();
    let (mut x, mut y, mut z) = (0.0, 0.0, 0.0);
    for k in 0..amps.len() {
        if k & bit != 0 {
            continue;
        }
        let (a0, a1) = (amps[k], amps[k | bit]);
        let cross = a0.conj() * a1;
        x += 2.0 * cross.re;
        y += 2.0 * cross.im;
        z += a0.norm_sqr() - a1.norm_sqr();
    }
    Ok(CoherentVector {
        m: 1,
        components: vec![x, y, z],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statecore::{
        density_from_pure, random_pure_state, reduced_density, Subsystem, EXACT_TOL,
    };
    use proptest::prelude::*;

    fn label(i: usize) -> QubitLabel {
        QubitLabel::new(i).unwrap()
    }

    #[test]
    fn maximally_mixed_qubit() {
        let t = pauli_expand(&DensityMatrix::maximally_mixed(1).unwrap()).unwrap();
        assert_eq!(t.coeffs(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn ket_zero_expansion() {
        let rho = density_from_pure(&PureState::basis(1, 0).unwrap()).unwrap();
        let t = pauli_expand(&rho).unwrap();
        assert_eq!(t.coeffs(), &[1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn bell_expansion_against_brute_force() {
        let rho = density_from_pure(&PureState::bell()).unwrap();
        let t = pauli_expand(&rho).unwrap();
        // brute force: Tr(rho P) with P built densely
        for flat in 0..16 {
            let mu = multi_index(flat, 2);
            let brute = (rho.matrix() * pauli_product(&mu)).trace();
            assert!((brute.re - t.get(&mu)).abs() < EXACT_TOL);
            assert!(brute.im.abs() < EXACT_TOL);
        }
        let expect = |mu: &[usize]| match mu {
            [0, 0] | [1, 1] | [3, 3] => 1.0,
            [2, 2] => -1.0,
            _ => 0.0,
        };
        for flat in 0..16 {
            let mu = multi_index(flat, 2);
            assert!((t.get(&mu) - expect(&mu)).abs() < EXACT_TOL, "{mu:?}");
        }
    }

    #[test]
    fn non_hermitian_input_is_flagged() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        m[(1, 1)] = Complex64::new(0.5, 0.0);
        m[(0, 1)] = Complex64::new(0.3, 0.0);
        let rho = DensityMatrix::from_trusted(1, m);
        assert!(matches!(pauli_expand(&rho), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn coherent_vector_examples() {
        let rho = density_from_pure(&PureState::basis(1, 0).unwrap()).unwrap();
        let xi = coherent_vector(&rho).unwrap();
        assert_eq!(xi.components(), &[0.0, 0.0, 1.0]);
        assert!((xi.norm_sq() - 1.0).abs() < TOL);

        let bell = density_from_pure(&PureState::bell()).unwrap();
        assert!((coherent_vector(&bell).unwrap().norm_sq() - 1.5).abs() < TOL);

        let mm = DensityMatrix::maximally_mixed(2).unwrap();
        let xi = coherent_vector(&mm).unwrap();
        assert_eq!(xi.components().len(), 15);
        assert!(xi.components().iter().all(|x| x.abs() < EXACT_TOL));
    }

    #[test]
    fn pure_norms_are_maximal() {
        for (m, expect) in [(1, 1.0), (2, 1.5), (3, 1.75)] {
            let rho = density_from_pure(&random_pure_state(m, 9).unwrap()).unwrap();
            assert!((coherent_norm_sq(&rho) - expect).abs() < TOL);
            assert!((max_norm_sq(m) - expect).abs() < EXACT_TOL);
        }
    }

    #[test]
    fn reduced_norms_of_ghz_and_w() {
        let ghz = PureState::ghz(3).unwrap();
        let red = reduced_density(&ghz, &Subsystem::new([1]).unwrap()).unwrap();
        assert!(coherent_norm_sq(&red).abs() < TOL);

        // W3 has b = c = e = 1/sqrt(3); 1 - 4|af-be|^2 - ... leaves
        // 1 - 4(1/9) - 4(1/9) = 1/9 for A1.
        let w = PureState::w(3).unwrap();
        let red = reduced_density(&w, &Subsystem::new([1]).unwrap()).unwrap();
        assert!((coherent_norm_sq(&red) - 1.0 / 9.0).abs() < TOL);
    }

    #[test]
    fn polarized_vector_examples() {
        let xi = polarized_vector(&PureState::basis(3, 0).unwrap(), label(2)).unwrap();
        assert_eq!(xi.components(), &[0.0, 0.0, 1.0]);
        let xi = polarized_vector(&PureState::ghz(3).unwrap(), label(1)).unwrap();
        assert!(xi.norm_sq() < EXACT_TOL);
        // a|000> + d|011>
        let s = PureState::from_real(&[0.6, 0.0, 0.0, 0.8, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((polarized_vector(&s, label(1)).unwrap().norm_sq() - 1.0).abs() < TOL);
        assert!(polarized_vector(&s, label(4)).is_err());
    }

    #[test]
    fn component_order_is_lexicographic() {
        let xi = coherent_vector(&DensityMatrix::maximally_mixed(2).unwrap()).unwrap();
        assert_eq!(xi.index_of(0), vec![0, 1]);
        assert_eq!(xi.index_of(3), vec![1, 0]);
        assert_eq!(xi.index_of(14), vec![3, 3]);
    }

    fn random_mixed(m: usize, seed: u64, k: usize) -> DensityMatrix {
        let states: Vec<_> = (0..k)
            .map(|i| random_pure_state(m, seed.wrapping_add(i as u64)).unwrap())
            .collect();
        let weights: Vec<f64> = (0..k).map(|i| 1.0 + i as f64).collect();
        let pairs: Vec<_> = weights.iter().copied().zip(states.iter()).collect();
        DensityMatrix::mixture(&pairs).unwrap()
    }

    proptest! {
        #[test]
        fn expansion_round_trip(m in 1usize..=4, seed in any::<u64>(), k in 1usize..4) {
            let rho = random_mixed(m, seed, k);
            let t = pauli_expand(&rho).unwrap();
            prop_assert!((t.coeffs()[0] - 1.0).abs() < TOL);
            let back = t.reconstruct();
            let err = (back - rho.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(err < TOL);
        }

        #[test]
        fn trace_route_matches_transform(m in 1usize..=3, seed in any::<u64>(), k in 1usize..4) {
            let rho = random_mixed(m, seed, k);
            let fast = coherent_vector(&rho).unwrap();
            let slow = coherent_vector_by_trace(&rho).unwrap();
            for (a, b) in fast.components().iter().zip(slow.components()) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }

        #[test]
        fn norm_identity(m in 1usize..=4, seed in any::<u64>(), k in 1usize..5) {
            let rho = random_mixed(m, seed, k);
            let xi = coherent_vector(&rho).unwrap();
            prop_assert!((xi.norm_sq() - coherent_norm_sq(&rho)).abs() < TOL);
            prop_assert!(xi.norm_sq() <= max_norm_sq(m) + TOL);
            prop_assert!(xi.norm_sq() >= -TOL);
        }

        #[test]
        fn purity_iff_maximal_norm(m in 1usize..=3, seed in any::<u64>(), k in 1usize..4) {
            let rho = random_mixed(m, seed, k);
            let is_pure = (purity(&rho) - 1.0).abs() < TOL;
            let is_max = (coherent_norm_sq(&rho) - max_norm_sq(m)).abs() < TOL;
            prop_assert_eq!(is_pure, is_max);
            // k == 1 is pure, k > 1 mixes distinct random states
            prop_assert_eq!(is_pure, k == 1);
        }

        #[test]
        fn two_qubit_polarization(seed in any::<u64>()) {
            let psi = random_pure_state(2, seed).unwrap();
            let x = psi.amplitudes();
            let det = (x[0] * x[3] - x[1] * x[2]).norm_sqr();
            for part in [1, 2] {
                let xi = polarized_vector(&psi, label(part)).unwrap();
                prop_assert!((xi.norm_sq() - (1.0 - 4.0 * det)).abs() < TOL);
            }
        }

        #[test]
        fn polarized_matches_reduced(n in 1usize..=5, seed in any::<u64>(), part in 1usize..=5) {
            prop_assume!(part <= n);
            let psi = random_pure_state(n, seed).unwrap();
            let red = reduced_density(&psi, &Subsystem::new([part]).unwrap()).unwrap();
            let a = polarized_vector(&psi, label(part)).unwrap();
            let b = coherent_vector(&red).unwrap();
            for (x, y) in a.components().iter().zip(b.components()) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }
}
