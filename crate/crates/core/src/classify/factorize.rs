use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rearrange::{apply_plan_state, RearrangePlan};
use crate::sepcrit::{block_separable, combinations, schmidt_oracle, CriterionVerdict, Thresholds};
use crate::statecore::{random_pure_state_with, PureState, Subsystem};

/// Largest `n` accepted by [`finest_factorization`].
pub const MAX_FACTORIZE_QUBITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct FactorBlock {
    /// Global labels, ascending.
    pub labels: Subsystem,
    /// Factor state on `labels` (in ascending label order), canonical phase.
    pub state: PureState,
    /// Two or more qubits with no separable proper sub-block.
    pub entangled: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationTree {
    pub n: usize,
    /// Sorted by smallest label.
    pub blocks: Vec<FactorBlock>,
    /// Every criterion evaluation made during the search, labels global.
    pub diagnostics: Vec<CriterionVerdict>,
}

/// Compact shape of a factorization, for comparisons and reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition(pub Vec<Vec<usize>>);

impl FactorizationTree {
    pub fn partition(&self) -> Partition {
        Partition(self.blocks.iter().map(|b| b.labels.indices()).collect())
    }

    pub fn is_fully_separable(&self) -> bool {
        self.blocks.len() == self.n
    }

    pub fn is_fully_entangled(&self) -> bool {
        self.n >= 2 && self.blocks.len() == 1
    }

    /// Tensor product of the block factors, laid out in global label order.
    pub fn reconstruct(&self) -> Result<PureState> {
        assemble(self.blocks.iter().map(|b| (&b.labels, &b.state)))
    }
}

/// Tensor product of states living on disjoint label sets, returned with
/// qubits in ascending label order.
pub fn assemble<'a, I>(parts: I) -> Result<PureState>
where
    I: IntoIterator<Item = (&'a Subsystem, &'a PureState)>,
{
    let mut product: Option<PureState> = None;
    let mut layout: Vec<usize> = Vec::new();
    for (labels, state) in parts {
        if labels.len() != state.n() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                got: state.n(),
            });
        }
        product = Some(match product {
            None => state.clone(),
            Some(p) => p.tensor(state)?,
        });
        layout.extend(labels.indices());
    }
    let product = product.ok_or_else(|| Error::InvalidArgument("nothing to assemble".into()))?;
    let n = layout.len();
    let mut sorted = layout.clone();
    sorted.sort();
    if sorted != (1..=n).collect::<Vec<_>>() {
        return Err(Error::InvalidArgument(format!(
            "labels {layout:?} do not cover 1..={n}"
        )));
    }
    // slot k holds label layout[k]; bubble the labels into order
    let mut swaps = Vec::new();
    for i in 0..n {
        for j in (i + 1..n).rev() {
            if layout[j - 1] > layout[j] {
                layout.swap(j - 1, j);
                swaps.push(j);
            }
        }
    }
    apply_plan_state(&product, &RearrangePlan::from_swaps(n, &swaps)?)
}

/// Random product of Haar-like blocks over a random partition of `1..=n`.
/// Blocks of two or more qubits are entangled with probability one.
pub fn random_block_product<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<(PureState, Partition)> {
    if n == 0 {
        return Err(Error::NoQubits);
    }
    let mut labels: Vec<usize> = (1..=n).collect();
    labels.shuffle(rng);
    let mut blocks = Vec::new();
    let mut rest = labels.as_slice();
    while !rest.is_empty() {
        let size = rng.random_range(1..=rest.len());
        let (head, tail) = rest.split_at(size);
        blocks.push(Subsystem::new(head.iter().copied())?);
        rest = tail;
    }
    let states = blocks
        .iter()
        .map(|b| random_pure_state_with(b.len(), rng))
        .collect::<Result<Vec<_>>>()?;
    let state = assemble(blocks.iter().zip(states.iter()))?;
    blocks.sort_by_key(|b| b.labels()[0]);
    Ok((
        state,
        Partition(blocks.iter().map(|b| b.indices()).collect()),
    ))
}

/// Splits a pure state into its unique finest tensor factorization.
///
/// Candidate blocks are tried by ascending size up to half the remaining
/// qubits, lexicographically within a size. The first block whose reduced
/// state is pure is factored off with the SVD oracle, and both factors are
/// searched again.
pub fn finest_factorization(state: &PureState, th: &Thresholds) -> Result<FactorizationTree> {
    if state.n() > MAX_FACTORIZE_QUBITS {
        return Err(Error::TooManyQubits {
            n: state.n(),
            max: MAX_FACTORIZE_QUBITS,
        });
    }
    let mut tree = FactorizationTree {
        n: state.n(),
        blocks: Vec::new(),
        diagnostics: Vec::new(),
    };
    split(
        state.canonical_phase(),
        (1..=state.n()).collect(),
        th,
        &mut tree,
    )?;
    tree.blocks.sort_by_key(|b| b.labels.labels()[0]);
    Ok(tree)
}

fn split(
    state: PureState,
    global: Vec<usize>,
    th: &Thresholds,
    tree: &mut FactorizationTree,
) -> Result<()> {
    let k = state.n();
    let to_global =
        |local: &Subsystem| Subsystem::new(local.indices().iter().map(|&l| global[l - 1])).unwrap();
    for size in 1..=k / 2 {
        let mut found: Option<Result<Subsystem>> = None;
        combinations(k, size, &mut |c| {
            if found.is_some() {
                return;
            }
            let block = Subsystem::new(c.iter().copied()).unwrap();
            match block_separable(&state, &block, th) {
                Ok(v) => {
                    let sep = v.separable;
                    tree.diagnostics.push(CriterionVerdict {
                        subsystem: to_global(&v.subsystem),
                        ..v
                    });
                    if sep {
                        found = Some(Ok(block));
                    }
                }
                Err(e) => found = Some(Err(e)),
            }
        });
        let Some(block) = found else { continue };
        let block = block?;
        let oracle = schmidt_oracle(&state, &block, th)?;
        let Some((blk_state, rest_state)) = oracle.factors else {
            let residual = tree
                .diagnostics
                .last()
                .map(|d| d.residual)
                .unwrap_or(f64::NAN);
            return Err(Error::Disagreement {
                block: to_global(&block).to_string(),
                residual,
                second: oracle.second_singular_value(),
            });
        };
        let rest = block.complement(k).expect("block is proper");
        let blk_global: Vec<usize> = block.indices().iter().map(|&l| global[l - 1]).collect();
        let rest_global: Vec<usize> = rest.indices().iter().map(|&l| global[l - 1]).collect();
        split(blk_state, blk_global, th, tree)?;
        split(rest_state, rest_global, th, tree)?;
        return Ok(());
    }
    tree.blocks.push(FactorBlock {
        labels: Subsystem::new(global.iter().copied())?,
        state: state.canonical_phase(),
        entangled: k >= 2,
    });
    Ok(())
}
