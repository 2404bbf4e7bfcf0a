//! Partial separability criteria for pure states and an SVD oracle.
//!
//! A block of qubits factors out of a pure state exactly when its reduced
//! state is pure, i.e. when the squared norm of its coherent vector reaches
//! the maximum `2 (1 - 2^-m)`. The oracle decides the same question from
//! the Schmidt rank of the amplitudes reshaped across the cut.

use faer::Mat;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paulispace::{coherent_norm_sq, max_norm_sq, polarized_vector};
use crate::rearrange::{apply_plan_state, move_block_to_end};
use crate::statecore::{
    random_unitary_2x2, reduced_density, scatter_table, PureState, QubitLabel, Subsystem,
    MAX_DENSITY_QUBITS, TOL,
};

/// Decision thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Absolute cutoff on `max_norm_sq - norm_sq`.
    pub criterion: f64,
    /// Cutoff on `s2 / s1` for the oracle.
    pub oracle: f64,
    /// Residuals in `[criterion, marginal]` are flagged as marginal.
    pub marginal: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            criterion: TOL,
            oracle: TOL,
            marginal: 1e-6,
        }
    }
}

impl Thresholds {
    /// Same criterion and oracle cutoff `tol`.
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            criterion: tol,
            oracle: tol,
            marginal: tol.max(1e-6),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub subsystem: Subsystem,
    pub norm_sq: f64,
    pub max_norm_sq: f64,
    pub residual: f64,
    pub separable: bool,
    /// Residual sits between the hard threshold and the marginal band.
    pub marginal: bool,
}

impl CriterionVerdict {
    fn new(subsystem: Subsystem, norm_sq: f64, th: &Thresholds) -> Self {
        let max = max_norm_sq(subsystem.len());
        let residual = max - norm_sq;
        Self {
            subsystem,
            norm_sq,
            max_norm_sq: max,
            residual,
            separable: residual < th.criterion,
            marginal: residual >= th.criterion && residual <= th.marginal,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleVerdict {
    pub subsystem: Subsystem,
    /// Descending Schmidt coefficients.
    pub singular_values: Vec<f64>,
    pub separable: bool,
    /// `(block state, complement state)` when separable, each with its first
    /// nonzero amplitude real and positive.
    pub factors: Option<(PureState, PureState)>,
}

impl OracleVerdict {
    pub fn second_singular_value(&self) -> f64 {
        self.singular_values.get(1).copied().unwrap_or(0.0)
    }
}

fn check_block(state: &PureState, block: &Subsystem) -> Result<()> {
    block.check_within(state.n())?;
    if block.len() >= state.n() {
        return Err(Error::VacuousBlock {
            size: block.len(),
            n: state.n(),
        });
    }
    Ok(())
}

/// Corollary-one test for a single qubit: `|xi_Ai|^2 = 1`.
pub fn one_part_separable(
    state: &PureState,
    part: QubitLabel,
    th: &Thresholds,
) -> Result<CriterionVerdict> {
    let xi = polarized_vector(state, part)?;
    if state.n() < 2 {
        return Err(Error::VacuousBlock { size: 1, n: 1 });
    }
    Ok(CriterionVerdict::new(
        Subsystem::single(part),
        xi.norm_sq(),
        th,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullSeparability {
    pub separable: bool,
    pub parts: Vec<CriterionVerdict>,
}

/// Fully separable iff every single qubit passes [`one_part_separable`].
pub fn fully_separable(state: &PureState, th: &Thresholds) -> Result<FullSeparability> {
    let parts = (1..=state.n())
        .map(|i| one_part_separable(state, QubitLabel::new(i)?, th))
        .collect::<Result<Vec<_>>>()?;
    Ok(FullSeparability {
        separable: parts.iter().all(|v| v.separable),
        parts,
    })
}

/// Amplitudes as a `2^(n-m) x 2^m` matrix: rows index the complement,
/// columns the block, both with ascending labels. Built by direct index
/// arithmetic.
fn bipartite_matrix(state: &PureState, block: &Subsystem) -> (Vec<usize>, Vec<usize>) {
    let n = state.n();
    let block_bits: Vec<usize> = block
        .labels()
        .iter()
        .map(|l| 1 << (n - l.index()))
        .collect();
    let rest_bits: Vec<usize> = (1..=n)
        .filter(|&l| !block.contains(QubitLabel::new(l).unwrap()))
        .map(|l| 1 << (n - l))
        .collect();
    (scatter_table(&rest_bits), scatter_table(&block_bits))
}

/// `Tr(rho_B^2)` from the Gram matrix on the smaller side of the cut.
pub fn block_purity(state: &PureState, block: &Subsystem) -> Result<f64> {
    check_block(state, block)?;
    let (rows, cols) = bipartite_matrix(state, block);
    let amps = state.amplitudes();
    let (outer, inner) = if rows.len() <= cols.len() {
        (&rows, &cols)
    } else {
        (&cols, &rows)
    };
    let at = |o: usize, i: usize| amps[outer[o] | inner[i]];
    let mut acc = 0.0;
    for a in 0..outer.len() {
        for b in a..outer.len() {
            let g: Complex64 = (0..inner.len()).map(|i| at(a, i) * at(b, i).conj()).sum();
            acc += if a == b {
                g.norm_sqr()
            } else {
                2.0 * g.norm_sqr()
            };
        }
    }
    Ok(acc)
}

/// Block test: the coherent vector of the reduced state on `block` has
/// maximal norm. The purity of the same block is computed independently
/// from the Gram matrix of the other side and must match.
pub fn block_separable(
    state: &PureState,
    block: &Subsystem,
    th: &Thresholds,
) -> Result<CriterionVerdict> {
    check_block(state, block)?;
    let m = block.len();
    let p = block_purity(state, block)?;
    let via_purity = 2.0 * (p - 0.5f64.powi(m as i32));
    let norm_sq = if m <= MAX_DENSITY_QUBITS {
        let rho = reduced_density(state, block)?;
        let direct = coherent_norm_sq(&rho);
        if (direct - via_purity).abs() > TOL {
            return Err(Error::Numerical(format!(
                "coherent norm {direct} vs purity route {via_purity} on {block}"
            )));
        }
        direct
    } else {
        via_purity
    };
    Ok(CriterionVerdict::new(block.clone(), norm_sq, th))
}

/// Schmidt decomposition across `block | complement`.
pub fn schmidt_oracle(
    state: &PureState,
    block: &Subsystem,
    th: &Thresholds,
) -> Result<OracleVerdict> {
    check_block(state, block)?;
    let n = state.n();
    let m = block.len();
    // Move the block to the tail; then row = complement index, column = block index.
    let plan = move_block_to_end(n, block)?;
    let moved = apply_plan_state(state, &plan)?;
    let cols = 1usize << m;
    let rows = 1usize << (n - m);
    let mat = Mat::from_fn(rows, cols, |r, c| moved.amplitude(r * cols + c));
    let svd = mat
        .thin_svd()
        .map_err(|e| Error::Numerical(format!("svd of block {block} failed: {e:?}")))?;
    let singular_values: Vec<f64> = svd.S().column_vector().iter().map(|s| s.re).collect();
    let s1 = singular_values[0];
    let s2 = singular_values.get(1).copied().unwrap_or(0.0);
    let separable = s2 < th.oracle * s1;
    let factors = if separable {
        // amplitude(r, c) ~ s1 * u[r, 0] * conj(v[c, 0])
        let comp = PureState::from_unnormalized(n - m, svd.U().col(0).iter().copied().collect());
        let blk =
            PureState::from_unnormalized(m, svd.V().col(0).iter().map(|z| z.conj()).collect());
        Some((blk.canonical_phase(), comp.canonical_phase()))
    } else {
        None
    };
    Ok(OracleVerdict {
        subsystem: block.clone(),
        singular_values,
        separable,
        factors,
    })
}

/// All nonempty proper subsets of `1..=n`, smallest first, lexicographic
/// within a size.
pub fn all_blocks(n: usize) -> Vec<Subsystem> {
    blocks_up_to(n, n.saturating_sub(1))
}

/// Nonempty subsets of `1..=n` with at most `max_size` labels, ordered by
/// size then lexicographically.
pub fn blocks_up_to(n: usize, max_size: usize) -> Vec<Subsystem> {
    let mut out = Vec::new();
    for size in 1..=max_size.min(n) {
        combinations(n, size, &mut |c| {
            out.push(Subsystem::new(c.iter().copied()).unwrap())
        });
    }
    out
}

/// Calls `f` for each `size`-subset of `1..=n` in lexicographic order.
pub fn combinations(n: usize, size: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == size {
            f(cur);
            return;
        }
        for l in start..=n {
            if n - l + 1 < size - cur.len() {
                break;
            }
            cur.push(l);
            rec(l + 1, n, size, cur, f);
            cur.pop();
        }
    }
    rec(1, n, size, &mut Vec::with_capacity(size), f);
}

/// Largest `n` for which [`local_unitary_invariance_check`] visits every block.
pub const MAX_INVARIANCE_QUBITS: usize = 10;

/// Applies an independent random unitary to every qubit and reports whether
/// every block keeps its separability verdict.
pub fn local_unitary_invariance_check(
    state: &PureState,
    seed: u64,
    th: &Thresholds,
) -> Result<bool> {
    let n = state.n();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two qubits".into()));
    }
    if n > MAX_INVARIANCE_QUBITS {
        return Err(Error::TooManyQubits {
            n,
            max: MAX_INVARIANCE_QUBITS,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rotated = state.clone();
    for l in 1..=n {
        let u = random_unitary_2x2(&mut rng);
        rotated = rotated.apply_local(QubitLabel::new(l)?, &u)?;
    }
    for block in all_blocks(n) {
        let before = block_separable(state, &block, th)?.separable;
        let after = block_separable(&rotated, &block, th)?.separable;
        if before != after {
            return Ok(false);
        }
    }
    Ok(true)
}
