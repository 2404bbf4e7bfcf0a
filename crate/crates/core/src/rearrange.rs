//! Exchanging operators and rearranged transformations.
//!
//! A [`RearrangePlan`] is a sequence of adjacent slot swaps. States are
//! permuted by shuffling index bits; the explicit `2^n x 2^n` operator built
//! from lifted swaps is only available for small `n` and serves as a check.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::statecore::{CMatrix, DensityMatrix, PureState, Subsystem};

/// Largest `n` for which [`plan_operator`] builds a dense matrix.
pub const MAX_OPERATOR_QUBITS: usize = 6;

/// The 4x4 two-qubit exchange operator. `S = S^-1 = S^dagger`.
pub fn swap_matrix() -> CMatrix {
    let mut s = CMatrix::zeros(4, 4);
    for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        s[(r, c)] = Complex64::new(1.0, 0.0);
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RearrangePlan {
    n: usize,
    /// One-based `(j, j + 1)` swaps in application order.
    moves: Vec<(usize, usize)>,
    /// `order[k]` is the original one-based label that ends up in slot `k + 1`.
    order: Vec<usize>,
}

impl RearrangePlan {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            moves: Vec::new(),
            order: (1..=n).collect(),
        }
    }

    /// Builds a plan from adjacent swaps `j <-> j + 1`, given by their lower slot.
    pub fn from_swaps(n: usize, swaps: &[usize]) -> Result<Self> {
        let mut plan = Self::identity(n);
        for &j in swaps {
            if j == 0 || j >= n {
                return Err(Error::InvalidArgument(format!(
                    "swap ({j}, {}) is outside 1..={n}",
                    j + 1
                )));
            }
            plan.order.swap(j - 1, j);
            plan.moves.push((j, j + 1));
        }
        Ok(plan)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn moves(&self) -> &[(usize, usize)] {
        &self.moves
    }

    pub fn net_permutation(&self) -> &[usize] {
        &self.order
    }

    pub fn is_identity(&self) -> bool {
        self.order.iter().enumerate().all(|(k, &l)| l == k + 1)
    }

    /// `other` applied after `self`.
    pub fn then(&self, other: &RearrangePlan) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let mut swaps: Vec<usize> = self.moves.iter().map(|m| m.0).collect();
        swaps.extend(other.moves.iter().map(|m| m.0));
        Self::from_swaps(self.n, &swaps)
    }

    /// Undoes the plan. Each swap is its own inverse.
    pub fn inverse(&self) -> Self {
        let swaps: Vec<usize> = self.moves.iter().rev().map(|m| m.0).collect();
        Self::from_swaps(self.n, &swaps).expect("moves already validated")
    }
}

/// Moves slot `from` to slot `to` (`from <= to`) by consecutive swaps.
pub fn move_to_slot(n: usize, from: usize, to: usize) -> Result<RearrangePlan> {
    if from == 0 || to > n || from > to {
        return Err(Error::InvalidArgument(format!(
            "cannot move slot {from} to slot {to} among {n}"
        )));
    }
    RearrangePlan::from_swaps(n, &(from..to).collect::<Vec<_>>())
}

/// `S_{n-1,n} ... S_{i,i+1}`: slot `i` to the end, the rest keep their order.
pub fn move_to_end(n: usize, i: usize) -> Result<RearrangePlan> {
    if i == 0 || i > n {
        return Err(Error::LabelOutOfRange { label: i, n });
    }
    move_to_slot(n, i, n)
}

/// Moves every label of `block` to the tail in ascending label order,
/// composing single moves from the largest label down (`j_m` to slot `n`,
/// then `j_{m-1}` to slot `n - 1`, ...).
pub fn move_block_to_end(n: usize, block: &Subsystem) -> Result<RearrangePlan> {
    block.check_within(n)?;
    let mut plan = RearrangePlan::identity(n);
    let labels = block.indices();
    for (k, &label) in labels.iter().rev().enumerate() {
        // labels smaller than `label` have not moved yet
        plan = plan.then(&move_to_slot(n, label, n - k)?)?;
    }
    Ok(plan)
}

fn check_n(plan: &RearrangePlan, n: usize) -> Result<()> {
    if plan.n != n {
        return Err(Error::DimensionMismatch {
            expected: plan.n,
            got: n,
        });
    }
    Ok(())
}

/// Index map: `table[old] = new`.
fn index_map(plan: &RearrangePlan) -> Vec<usize> {
    let n = plan.n;
    (0..1usize << n)
        .map(|old| {
            plan.order
                .iter()
                .enumerate()
                .fold(0, |new, (slot, &label)| {
                    let bit = old >> (n - label) & 1;
                    new | bit << (n - 1 - slot)
                })
        })
        .collect()
}

pub fn apply_plan_state(state: &PureState, plan: &RearrangePlan) -> Result<PureState> {
    check_n(plan, state.n())?;
    let map = index_map(plan);
    let mut amps = vec![Complex64::new(0.0, 0.0); state.dim()];
    for (old, &new) in map.iter().enumerate() {
        amps[new] = state.amplitude(old);
    }
    Ok(PureState::from_unnormalized(state.n(), amps))
}

/// `U rho U^dagger` for the permutation `U` of the plan.
pub fn apply_plan_density(rho: &DensityMatrix, plan: &RearrangePlan) -> Result<DensityMatrix> {
    check_n(plan, rho.qubits())?;
    let map = index_map(plan);
    let d = rho.dim();
    let mut out = CMatrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            out[(map[r], map[c])] = rho.entry(r, c);
        }
    }
    Ok(DensityMatrix::from_trusted(rho.qubits(), out))
}

/// `S^{(n)}_{j,j+1} = I (x) ... (x) S (x) ... (x) I`.
pub fn lifted_swap(n: usize, j: usize) -> Result<CMatrix> {
    if j == 0 || j >= n {
        return Err(Error::InvalidArgument(format!(
            "swap ({j}, {}) outside 1..={n}",
            j + 1
        )));
    }
    let eye = |k: usize| CMatrix::identity(1 << k, 1 << k);
    Ok(eye(j - 1)
        .kronecker(&swap_matrix())
        .kronecker(&eye(n - j - 1)))
}

/// Dense product of lifted swaps realizing the plan.
pub fn plan_operator(plan: &RearrangePlan) -> Result<CMatrix> {
    if plan.n > MAX_OPERATOR_QUBITS {
        return Err(Error::TooManyQubits {
            n: plan.n,
            max: MAX_OPERATOR_QUBITS,
        });
    }
    let d = 1usize << plan.n;
    let mut u = CMatrix::identity(d, d);
    for &(j, _) in &plan.moves {
        u = lifted_swap(plan.n, j)? * u;
    }
    Ok(u)
}
