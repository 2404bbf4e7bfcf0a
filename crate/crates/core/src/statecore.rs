//! Pure states, density matrices, partial traces and purity.
//!
//! Basis convention: for an `n`-qubit state the flat amplitude index is
//! `k = sum_j alpha_j * 2^(n - j)`, so qubit 1 (label `A1`) is the most
//! significant bit. Every other module relies on this ordering.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for scalar comparisons (norms, purity, coherent norms).
pub const TOL: f64 = 1e-9;
/// Tolerance for identities that hold in exact arithmetic.
pub const EXACT_TOL: f64 = 1e-12;
/// States whose norm is within this distance of 1 are renormalized on ingest.
pub const RENORM_TOL: f64 = 1e-6;
/// Largest qubit count held as a dense amplitude vector.
pub const MAX_QUBITS: usize = 14;
/// Largest subsystem for which a density matrix is materialized.
pub const MAX_DENSITY_QUBITS: usize = 10;

pub type CMatrix = DMatrix<Complex64>;

/// One-based qubit label, `A1 ... An`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitLabel(usize);

impl QubitLabel {
    pub fn new(index: usize) -> Result<Self> {
        if index == 0 {
            return Err(Error::LabelOutOfRange { label: 0, n: 0 });
        }
        Ok(Self(index))
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub(crate) fn check(self, n: usize) -> Result<()> {
        if self.0 > n {
            Err(Error::LabelOutOfRange { label: self.0, n })
        } else {
            Ok(())
        }
    }

    /// Bit of the flat index that carries this qubit in an `n`-qubit state.
    pub(crate) fn bit(self, n: usize) -> usize {
        1 << (n - self.0)
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}", self.0)
    }
}

/// Nonempty set of distinct labels, kept in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Subsystem {
    labels: Vec<QubitLabel>,
}

impl Subsystem {
    pub fn new<I: IntoIterator<Item = usize>>(labels: I) -> Result<Self> {
        let mut out = Vec::new();
        for l in labels {
            out.push(QubitLabel::new(l)?);
        }
        if out.is_empty() {
            return Err(Error::EmptySubsystem);
        }
        out.sort();
        for w in out.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateLabel(w[0].index()));
            }
        }
        Ok(Self { labels: out })
    }

    /// All labels `1..=n`.
    pub fn full(n: usize) -> Self {
        Self {
            labels: (1..=n).map(QubitLabel).collect(),
        }
    }

    pub fn single(label: QubitLabel) -> Self {
        Self {
            labels: vec![label],
        }
    }

    pub fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }

    pub fn indices(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l.index()).collect()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, label: QubitLabel) -> bool {
        self.labels.binary_search(&label).is_ok()
    }

    pub fn check_within(&self, n: usize) -> Result<()> {
        self.labels.iter().try_for_each(|l| l.check(n))
    }

    /// Labels of `1..=n` not in this subsystem; `None` if that set is empty.
    pub fn complement(&self, n: usize) -> Option<Self> {
        let labels: Vec<_> = (1..=n)
            .map(QubitLabel)
            .filter(|l| !self.contains(*l))
            .collect();
        (!labels.is_empty()).then_some(Self { labels })
    }
}

impl TryFrom<Vec<usize>> for Subsystem {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Subsystem> for Vec<usize> {
    fn from(s: Subsystem) -> Self {
        s.indices()
    }
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

/// Maps local indices of a subsystem (first label = most significant bit) to
/// the corresponding bits of the full flat index.
pub(crate) fn scatter_table(bits: &[usize]) -> Vec<usize> {
    let k = bits.len();
    (0..1usize << k)
        .map(|local| {
            bits.iter()
                .enumerate()
                .filter(|(i, _)| local >> (k - 1 - i) & 1 == 1)
                .fold(0, |acc, (_, b)| acc | b)
        })
        .collect()
}

/// Normalized pure state of `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Builds a state from `2^n` amplitudes, renormalizing if the norm is
    /// within [`RENORM_TOL`] of one.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 {
            return Err(if len == 1 {
                Error::NoQubits
            } else {
                Error::NotPowerOfTwo(0)
            });
        }
        if !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
        }
        if let Some(i) = amplitudes
            .iter()
            .position(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::NonFinite(i));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        if (norm - 1.0).abs() > RENORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self::from_unnormalized(n, amplitudes))
    }

    /// Normalizes any nonzero vector. Used for internally generated states.
    pub(crate) fn from_unnormalized(n: usize, mut amplitudes: Vec<Complex64>) -> Self {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 4.0 * f64::EPSILON {
            amplitudes.iter_mut().for_each(|a| *a /= norm);
        }
        Self { n, amplitudes }
    }

    /// Builds a state from any nonzero amplitude vector of length `2^n`.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis state `|k>`.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoQubits);
        }
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
        }
        if k >= 1 << n {
            return Err(Error::InvalidArgument(format!(
                "basis index {k} out of range for {n} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[k] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n,
            amplitudes: amps,
        })
    }

    /// `(|0...0> + |1...1>)/sqrt(2)`.
    pub fn ghz(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(
                "GHZ needs at least two qubits".into(),
            ));
        }
        let mut amps = vec![0.0; 1 << n];
        amps[0] = 1.0;
        amps[(1 << n) - 1] = 1.0;
        Self::from_real(&amps)
    }

    /// Equal superposition of the single-excitation basis states.
    pub fn w(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("W needs at least two qubits".into()));
        }
        let mut amps = vec![0.0; 1 << n];
        for j in 0..n {
            amps[1 << j] = 1.0;
        }
        Self::from_real(&amps)
    }

    /// `(|00> + |11>)/sqrt(2)`.
    pub fn bell() -> Self {
        Self::ghz(2).expect("two qubits")
    }

    /// `self (x) other`; the qubits of `self` come first.
    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let n = self.n + other.n;
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
        }
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        Ok(Self::from_unnormalized(n, amps))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, k: usize) -> Complex64 {
        self.amplitudes[k]
    }

    /// Same ray with the first non-negligible amplitude made real and positive.
    pub fn canonical_phase(&self) -> Self {
        let pivot = self
            .amplitudes
            .iter()
            .find(|a| a.norm() > 1e-12)
            .copied()
            .unwrap_or(Complex64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        Self {
            n: self.n,
            amplitudes: self.amplitudes.iter().map(|a| a * phase).collect(),
        }
    }

    /// `|<self|other>|`, the overlap magnitude. Equals one iff the two states
    /// agree up to a global phase.
    pub fn overlap(&self, other: &PureState) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm())
    }

    /// Largest entrywise distance after aligning global phases.
    pub fn phase_distance(&self, other: &PureState) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let a = self.canonical_phase();
        let b = other.canonical_phase();
        Ok(a.amplitudes
            .iter()
            .zip(&b.amplitudes)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    /// Applies a 2x2 unitary to one qubit.
    pub fn apply_local(&self, label: QubitLabel, u: &[[Complex64; 2]; 2]) -> Result<Self> {
        label.check(self.n)?;
        let bit = label.bit(self.n);
        let mut out = self.amplitudes.clone();
        for k in 0..self.dim() {
            if k & bit == 0 {
                let (a0, a1) = (self.amplitudes[k], self.amplitudes[k | bit]);
                out[k] = u[0][0] * a0 + u[0][1] * a1;
                out[k | bit] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
        Ok(Self::from_unnormalized(self.n, out))
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix on `m` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: usize,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity (all within [`TOL`]).
    pub fn new(mat: CMatrix) -> Result<Self> {
        let dim = mat.nrows();
        if dim != mat.ncols() {
            return Err(Error::InvalidDensity(format!(
                "{}x{} is not square",
                dim,
                mat.ncols()
            )));
        }
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        let m = dim.trailing_zeros() as usize;
        if m > MAX_DENSITY_QUBITS {
            return Err(Error::TooManyQubits {
                n: m,
                max: MAX_DENSITY_QUBITS,
            });
        }
        let herm = (&mat - mat.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm > TOL {
            return Err(Error::InvalidDensity(format!(
                "hermiticity defect {herm:e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let eigenvalues = faer::Mat::from_fn(dim, dim, |i, j| mat[(i, j)])
            .self_adjoint_eigenvalues(faer::Side::Lower)
            .map_err(|e| Error::Numerical(format!("eigendecomposition failed: {e:?}")))?;
        let min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { m, mat })
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_trusted(m: usize, mat: CMatrix) -> Self {
        debug_assert_eq!(mat.nrows(), 1 << m);
        Self { m, mat }
    }

    /// `I / 2^m`.
    pub fn maximally_mixed(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::NoQubits);
        }
        if m > MAX_DENSITY_QUBITS {
            return Err(Error::TooManyQubits {
                n: m,
                max: MAX_DENSITY_QUBITS,
            });
        }
        let d = 1usize << m;
        Ok(Self::from_trusted(
            m,
            CMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0),
        ))
    }

    /// Convex combination `sum_i w_i |psi_i><psi_i|`; weights are normalized.
    pub fn mixture(states: &[(f64, &PureState)]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let m = first.1.n();
        let total: f64 = states.iter().map(|(w, _)| *w).sum();
        if states.iter().any(|(w, _)| *w < 0.0) || total <= 0.0 {
            return Err(Error::InvalidArgument(
                "mixture weights must be nonnegative".into(),
            ));
        }
        let mut acc = CMatrix::zeros(1 << m, 1 << m);
        for (w, s) in states {
            if s.n() != m {
                return Err(Error::DimensionMismatch {
                    expected: 1 << m,
                    got: s.dim(),
                });
            }
            acc += density_from_pure(s)?.mat * Complex64::new(w / total, 0.0);
        }
        Ok(Self::from_trusted(m, acc))
    }

    pub fn qubits(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    /// Largest entrywise distance to another matrix of the same size.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        (&self.mat - &other.mat)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// `|psi><psi|`.
pub fn density_from_pure(state: &PureState) -> Result<DensityMatrix> {
    if state.n() > MAX_DENSITY_QUBITS {
        return Err(Error::TooManyQubits {
            n: state.n(),
            max: MAX_DENSITY_QUBITS,
        });
    }
    let d = state.dim();
    let amps = state.amplitudes();
    let mat = CMatrix::from_fn(d, d, |j, k| amps[j] * amps[k].conj());
    Ok(DensityMatrix::from_trusted(state.n(), mat))
}

fn kept_and_traced(n: usize, keep: &Subsystem) -> Result<(Vec<usize>, Vec<usize>)> {
    keep.check_within(n)?;
    let kept: Vec<usize> = keep.labels().iter().map(|l| l.bit(n)).collect();
    let traced: Vec<usize> = (1..=n)
        .map(QubitLabel)
        .filter(|l| !keep.contains(*l))
        .map(|l| l.bit(n))
        .collect();
    Ok((scatter_table(&kept), scatter_table(&traced)))
}

/// Reduced density matrix on `keep`; output qubits follow ascending labels.
pub fn partial_trace(rho: &DensityMatrix, keep: &Subsystem) -> Result<DensityMatrix> {
    let (kept, traced) = kept_and_traced(rho.qubits(), keep)?;
    let d = kept.len();
    let mat = CMatrix::from_fn(d, d, |r, c| {
        traced
            .iter()
            .map(|t| rho.mat[(kept[r] | t, kept[c] | t)])
            .sum()
    });
    Ok(DensityMatrix::from_trusted(keep.len(), mat))
}

/// Reduced density matrix of a pure state on `keep`, without forming the
/// full `2^n x 2^n` projector.
pub fn reduced_density(state: &PureState, keep: &Subsystem) -> Result<DensityMatrix> {
    if keep.len() > MAX_DENSITY_QUBITS {
        return Err(Error::TooManyQubits {
            n: keep.len(),
            max: MAX_DENSITY_QUBITS,
        });
    }
    let (kept, traced) = kept_and_traced(state.n(), keep)?;
    let amps = state.amplitudes();
    let d = kept.len();
    let mut mat = CMatrix::zeros(d, d);
    for r in 0..d {
        for c in r..d {
            let v: Complex64 = traced
                .iter()
                .map(|t| amps[kept[r] | t] * amps[kept[c] | t].conj())
                .sum();
            mat[(r, c)] = v;
            mat[(c, r)] = v.conj();
        }
    }
    Ok(DensityMatrix::from_trusted(keep.len(), mat))
}

/// `Tr(rho^2)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    let m = &rho.mat;
    let d = m.nrows();
    let mut acc = 0.0;
    for j in 0..d {
        for k in 0..d {
            acc += (m[(j, k)] * m[(k, j)]).re;
        }
    }
    acc
}

/// Normalized state with independent standard complex Gaussian amplitudes.
pub fn random_pure_state(n: usize, seed: u64) -> Result<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_pure_state_with(n, &mut rng)
}

pub fn random_pure_state_with<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PureState> {
    if n == 0 {
        return Err(Error::NoQubits);
    }
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
    }
    let amps = (0..1usize << n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect();
    Ok(PureState::from_unnormalized(n, amps))
}

/// Haar-random 2x2 unitary.
pub fn random_unitary_2x2<R: rand::Rng + ?Sized>(rng: &mut R) -> [[Complex64; 2]; 2] {
    let mut g =
        || -> Complex64 { Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)) };
    let (a, b) = (g(), g());
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / norm, b / norm);
    let phase = Complex64::from_polar(1.0, g().arg());
    [[a, -b.conj() * phase], [b, a.conj() * phase]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sub(v: &[usize]) -> Subsystem {
        Subsystem::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn ket_zero_projector() {
        let rho = density_from_pure(&PureState::basis(1, 0).unwrap()).unwrap();
        assert_eq!(rho.entry(0, 0), c(1.0));
        assert_eq!(rho.entry(1, 1), c(0.0));
        assert_eq!(rho.entry(0, 1), c(0.0));
    }

    #[test]
    fn bell_projector_corners() {
        let rho = density_from_pure(&PureState::bell()).unwrap();
        for j in 0..4 {
            for k in 0..4 {
                let corner = (j == 0 || j == 3) && (k == 0 || k == 3);
                let expect = if corner { 0.5 } else { 0.0 };
                assert!((rho.entry(j, k) - c(expect)).norm() < EXACT_TOL);
            }
        }
    }

    #[test]
    fn ghz3_projector_is_pure() {
        let rho = density_from_pure(&PureState::ghz(3).unwrap()).unwrap();
        // Tr(rho^2) via an explicit matrix product.
        let sq = rho.matrix() * rho.matrix();
        assert!((sq.trace().re - 1.0).abs() < TOL);
        assert!((purity(&rho) - 1.0).abs() < TOL);
    }

    #[test]
    fn trace_out_product_state() {
        let rho = density_from_pure(&PureState::basis(2, 0).unwrap()).unwrap();
        let red = partial_trace(&rho, &sub(&[1])).unwrap();
        assert_eq!(red.entry(0, 0), c(1.0));
        assert_eq!(red.entry(1, 1), c(0.0));
    }

    #[test]
    fn ghz3_single_qubit_is_maximally_mixed() {
        let rho = density_from_pure(&PureState::ghz(3).unwrap()).unwrap();
        let red = partial_trace(&rho, &sub(&[1])).unwrap();
        let mm = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(red.max_abs_diff(&mm) < EXACT_TOL);
    }

    #[test]
    fn ghz4_pair_purity_is_half() {
        let psi = PureState::ghz(4).unwrap();
        let red = reduced_density(&psi, &sub(&[3, 4])).unwrap();
        // diag(1/2, 0, 0, 1/2)
        for j in 0..4 {
            for k in 0..4 {
                let expect = if j == k && (j == 0 || j == 3) {
                    0.5
                } else {
                    0.0
                };
                assert!((red.entry(j, k) - c(expect)).norm() < EXACT_TOL);
            }
        }
        assert!((purity(&red) - 0.5).abs() < TOL);
    }

    #[test]
    fn purity_of_maximally_mixed_qubit() {
        let mm = DensityMatrix::maximally_mixed(1).unwrap();
        assert!((purity(&mm) - 0.5).abs() < TOL);
    }

    #[test]
    fn output_order_follows_ascending_labels() {
        // |0>|1>|1> traced to {A1, A3} gives |01>, regardless of the
        // order the labels were given in.
        let psi = PureState::basis(3, 0b011).unwrap();
        let red = reduced_density(&psi, &Subsystem::new([3, 1]).unwrap()).unwrap();
        assert_eq!(red.entry(1, 1), c(1.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(PureState::new(vec![c(0.0); 4]), Err(Error::ZeroVector));
        assert_eq!(
            PureState::new(vec![c(1.0); 3]),
            Err(Error::NotPowerOfTwo(3))
        );
        assert!(matches!(
            PureState::new(vec![c(1.0), c(1.0)]),
            Err(Error::NotNormalized(_))
        ));
        assert_eq!(random_pure_state(0, 1), Err(Error::NoQubits));
        let rho = density_from_pure(&PureState::bell()).unwrap();
        assert_eq!(
            partial_trace(&rho, &sub(&[3])),
            Err(Error::LabelOutOfRange { label: 3, n: 2 })
        );
        assert_eq!(
            Subsystem::new(Vec::<usize>::new()),
            Err(Error::EmptySubsystem)
        );
        assert_eq!(Subsystem::new([2, 2]), Err(Error::DuplicateLabel(2)));
        assert!(Subsystem::new([0]).is_err());
    }

    #[test]
    fn renormalizes_near_unit_vectors() {
        let s = PureState::new(vec![c(1.0 + 5e-7), c(0.0)]).unwrap();
        assert_eq!(s.amplitude(0), c(1.0));
    }

    #[test]
    fn density_validation() {
        let bad = CMatrix::from_row_slice(2, 2, &[c(0.5), c(1.0), c(0.0), c(0.5)]);
        assert!(matches!(
            DensityMatrix::new(bad),
            Err(Error::InvalidDensity(_))
        ));
        let neg = CMatrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(matches!(
            DensityMatrix::new(neg),
            Err(Error::InvalidDensity(_))
        ));
        let ok = CMatrix::from_row_slice(2, 2, &[c(0.5), c(0.0), c(0.0), c(0.5)]);
        assert!(DensityMatrix::new(ok).is_ok());
    }

    #[test]
    fn random_state_is_deterministic_and_normalized() {
        let a = random_pure_state(1, 42).unwrap();
        let b = random_pure_state(1, 42).unwrap();
        assert_eq!(a, b);
        let norm: f64 = a.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < EXACT_TOL);
        assert_ne!(a, random_pure_state(1, 43).unwrap());
    }

    proptest! {
        #[test]
        fn pure_projector_has_unit_purity(n in 1usize..=5, seed in any::<u64>()) {
            let psi = random_pure_state(n, seed).unwrap();
            let rho = density_from_pure(&psi).unwrap();
            prop_assert!((purity(&rho) - 1.0).abs() < TOL);
        }

        #[test]
        fn partial_trace_bounds(n in 2usize..=5, seed in any::<u64>(), mask in 1usize..31) {
            let psi = random_pure_state(n, seed).unwrap();
            let labels: Vec<usize> = (1..=n).filter(|l| mask >> (l - 1) & 1 == 1).collect();
            prop_assume!(!labels.is_empty());
            let keep = Subsystem::new(labels).unwrap();
            let rho = density_from_pure(&psi).unwrap();
            let red = partial_trace(&rho, &keep).unwrap();
            prop_assert!((red.trace().re - 1.0).abs() < EXACT_TOL);
            let p = purity(&red);
            prop_assert!(p <= 1.0 + TOL);
            prop_assert!(p >= 0.5f64.powi(keep.len() as i32) - TOL);
            // the pure-state route matches the projector route
            let direct = reduced_density(&psi, &keep).unwrap();
            prop_assert!(direct.max_abs_diff(&red) < EXACT_TOL);
        }

        #[test]
        fn full_trace_is_identity(n in 1usize..=4, seed in any::<u64>()) {
            let rho = density_from_pure(&random_pure_state(n, seed).unwrap()).unwrap();
            let same = partial_trace(&rho, &Subsystem::full(n)).unwrap();
            prop_assert!(same.max_abs_diff(&rho) < EXACT_TOL);
        }

        #[test]
        fn stepwise_trace_matches_one_shot(seed in any::<u64>()) {
            let rho = density_from_pure(&random_pure_state(4, seed).unwrap()).unwrap();
            // trace out A2, then A3 (now the second slot of {A1,A3,A4})
            let step1 = partial_trace(&rho, &sub(&[1, 3, 4])).unwrap();
            let step2 = partial_trace(&step1, &sub(&[1, 3])).unwrap();
            let once = partial_trace(&rho, &sub(&[1, 4])).unwrap();
            prop_assert!(step2.max_abs_diff(&once) < EXACT_TOL);
        }
    }
}
