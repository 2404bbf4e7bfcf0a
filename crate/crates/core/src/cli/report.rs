use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classify::{
    classify_support_3q, finest_factorization, Class3, Partition, Support, SupportClass,
};
use crate::error::{Error, Result};
use crate::paulispace::polarized_vector;
use crate::sepcrit::{block_separable, blocks_up_to, schmidt_oracle, Thresholds};
use crate::statecore::{PureState, QubitLabel, Subsystem};

/// Bloch vector of one qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartEntry {
    pub qubit: usize,
    pub xi: [f64; 3],
    pub xi_sq: f64,
}

/// Criterion and oracle verdicts for one block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockEntry {
    pub block: Subsystem,
    pub norm_sq: f64,
    pub max_norm_sq: f64,
    pub residual: f64,
    pub criterion_separable: bool,
    pub marginal: bool,
    pub singular_values: Vec<f64>,
    pub oracle_separable: bool,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorEntry {
    pub labels: Subsystem,
    pub entangled: bool,
}

/// Full classification of one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub n: usize,
    /// SHA-256 of the normalized amplitudes (little-endian re, im pairs).
    pub digest: String,
    pub tolerance: f64,
    pub parts: Vec<PartEntry>,
    /// Blocks of at most `n / 2` qubits; each verdict also covers the
    /// complement.
    pub blocks: Vec<BlockEntry>,
    pub factorization: Vec<FactorEntry>,
    pub summary: String,
    pub disagreement: bool,
    pub marginal_warning: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_class: Option<SupportClass>,
}

/// Rounds values that print as zero to `+0` so `-0.000` never appears.
pub(crate) fn clean(x: f64) -> f64 {
    if x.abs() < 5e-13 {
        0.0
    } else {
        x
    }
}

pub fn digest(state: &PureState) -> String {
    let mut h = Sha256::new();
    for a in state.amplitudes() {
        h.update(a.re.to_le_bytes());
        h.update(a.im.to_le_bytes());
    }
    h.finalize()
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

fn list_blocks(blocks: &[FactorEntry]) -> String {
    blocks
        .iter()
        .map(|b| b.labels.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// One-line verdict from a factorization.
pub fn summarize(n: usize, blocks: &[FactorEntry]) -> String {
    if blocks.len() == n {
        format!("fully separable, blocks: {}", list_blocks(blocks))
    } else if blocks.len() == 1 {
        format!("fully entangled, blocks: {}", list_blocks(blocks))
    } else {
        let parts: Vec<String> = blocks
            .iter()
            .map(|b| {
                if b.entangled {
                    format!("{} (entangled)", b.labels)
                } else {
                    b.labels.to_string()
                }
            })
            .collect();
        format!("partially separable, blocks: {}", parts.join(", "))
    }
}

impl Report {
    pub fn build(state: &PureState, label: Option<String>, th: &Thresholds) -> Result<Self> {
        let n = state.n();
        let parts = (1..=n)
            .map(|q| {
                let xi = polarized_vector(state, QubitLabel::new(q)?)?;
                let c = xi.components();
                Ok(PartEntry {
                    qubit: q,
                    xi: [c[0], c[1], c[2]],
                    xi_sq: xi.norm_sq(),
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let mut blocks = Vec::new();
        for b in blocks_up_to(n, n / 2) {
            let c = block_separable(state, &b, th)?;
            let o = schmidt_oracle(state, &b, th)?;
            blocks.push(BlockEntry {
                block: b,
                norm_sq: c.norm_sq,
                max_norm_sq: c.max_norm_sq,
                residual: c.residual,
                criterion_separable: c.separable,
                marginal: c.marginal,
                agree: c.separable == o.separable,
                oracle_separable: o.separable,
                singular_values: o.singular_values,
            });
        }
        let mut disagreement = blocks.iter().any(|b| !b.agree);

        let factorization = match finest_factorization(state, th) {
            Ok(tree) => tree
                .blocks
                .iter()
                .map(|b| FactorEntry {
                    labels: b.labels.clone(),
                    entangled: b.entangled,
                })
                .collect(),
            Err(Error::Disagreement { .. }) => {
                disagreement = true;
                Vec::new()
            }
            Err(e) => return Err(e),
        };
        let summary = if disagreement {
            "criterion/oracle disagreement, no factorization".to_string()
        } else {
            summarize(n, &factorization)
        };

        let support_class = if n == 3 {
            let support = Support::of_state(state, th.criterion)?;
            let sc = classify_support_3q(support, Some(state.amplitudes()), th.criterion)?;
            if !disagreement {
                let p = Partition(factorization.iter().map(|b| b.labels.indices()).collect());
                if Class3::from_partition(&p)? != sc.class {
                    disagreement = true;
                }
            }
            Some(sc)
        } else {
            None
        };

        Ok(Self {
            label,
            n,
            digest: digest(state),
            tolerance: th.criterion,
            marginal_warning: blocks.iter().any(|b| b.marginal),
            parts,
            blocks,
            factorization,
            summary,
            disagreement,
            support_class,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.summary);
        if self.disagreement {
            let _ = writeln!(s, "DISAGREEMENT: criterion and oracle verdicts differ");
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "state:     {} (n = {})",
            self.label.as_deref().unwrap_or("-"),
            self.n
        );
        let _ = writeln!(s, "digest:    sha256:{}", self.digest);
        let _ = writeln!(s, "tolerance: {:e}", self.tolerance);
        let _ = writeln!(s);
        let _ = writeln!(s, "single-qubit polarization:");
        for p in &self.parts {
            let _ = writeln!(
                s,
                "  A{:<3} xi = ({:+.12}, {:+.12}, {:+.12})  xi^2 = {:.12}",
                p.qubit,
                clean(p.xi[0]),
                clean(p.xi[1]),
                clean(p.xi[2]),
                clean(p.xi_sq)
            );
        }
        if !self.blocks.is_empty() {
            let _ = writeln!(s);
            let _ = writeln!(s, "blocks (criterion vs Schmidt oracle):");
            for b in &self.blocks {
                let word = |sep: bool| if sep { "separable" } else { "entangled" };
                let _ = writeln!(
                    s,
                    "  {:<16} norm^2 {:.12}  max {:.12}  residual {:.3e}  criterion {}  oracle {} (s2 = {:.3e}){}",
                    b.block.to_string(),
                    clean(b.norm_sq),
                    b.max_norm_sq,
                    b.residual,
                    word(b.criterion_separable),
                    word(b.oracle_separable),
                    b.singular_values.get(1).copied().unwrap_or(0.0),
                    if b.agree { "" } else { "  MISMATCH" }
                );
            }
        }
        for b in self.blocks.iter().filter(|b| b.marginal) {
            let _ = writeln!(
                s,
                "warning: marginal residual {:.3e} on {}",
                b.residual, b.block
            );
        }
        if let Some(sc) = &self.support_class {
            let _ = writeln!(s);
            let _ = write!(s, "support {}: {}", sc.support, sc.class);
            if sc.conditional {
                let conds: Vec<String> = sc
                    .conditions
                    .iter()
                    .map(|(c, h)| format!("{c} {}", if *h { "holds" } else { "fails" }))
                    .collect();
                let _ = write!(s, " ({})", conds.join(", "));
            }
            let _ = writeln!(s);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summaries() {
        let th = Thresholds::default();
        let ghz = Report::build(&PureState::ghz(3).unwrap(), None, &th).unwrap();
        assert_eq!(ghz.summary, "fully entangled, blocks: {A1,A2,A3}");
        let zb = PureState::basis(1, 0)
            .unwrap()
            .tensor(&PureState::bell())
            .unwrap();
        let r = Report::build(&zb, None, &th).unwrap();
        assert_eq!(
            r.summary,
            "partially separable, blocks: {A1}, {A2,A3} (entangled)"
        );
        let p = Report::build(&PureState::basis(2, 1).unwrap(), None, &th).unwrap();
        assert_eq!(p.summary, "fully separable, blocks: {A1}, {A2}");
        assert!(!r.disagreement && !ghz.disagreement);
    }

    #[test]
    fn json_round_trip() {
        let th = Thresholds::default();
        let r = Report::build(
            &crate::statecore::random_pure_state(3, 9).unwrap(),
            Some("x".into()),
            &th,
        )
        .unwrap();
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }
}
