use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::statecore::{PureState, MAX_QUBITS};

/// On-disk state: JSON with explicit `n` and `[re, im]` pairs, qubit 1 as
/// the most significant bit of the amplitude index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state(state: &PureState, label: Option<&str>) -> Self {
        Self {
            n: state.n(),
            label: label.map(str::to_owned),
            amplitudes: state.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("malformed state file: {e}"))
    }

    pub fn read(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    /// Validates against `max_qubits` and builds the normalized state.
    pub fn to_state(&self, max_qubits: usize) -> Result<PureState, String> {
        if self.n == 0 {
            return Err("n must be at least 1".into());
        }
        if self.n > max_qubits.min(MAX_QUBITS) {
            return Err(format!(
                "n = {} exceeds the limit of {} qubits",
                self.n,
                max_qubits.min(MAX_QUBITS)
            ));
        }
        let expected = 1usize << self.n;
        if self.amplitudes.len() != expected {
            return Err(format!(
                "length error: n = {} needs {expected} amplitudes, file has {}",
                self.n,
                self.amplitudes.len()
            ));
        }
        let amps = self
            .amplitudes
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        PureState::new(amps).map_err(|e| e.to_string())
    }

    /// JSON text with every double written to 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut s = String::from("{\n");
        let _ = writeln!(s, "  \"n\": {},", self.n);
        if let Some(l) = &self.label {
            let _ = writeln!(
                s,
                "  \"label\": {},",
                serde_json::to_string(l).expect("string serializes")
            );
        }
        s.push_str("  \"amplitudes\": [\n");
        for (i, [re, im]) in self.amplitudes.iter().enumerate() {
            let sep = if i + 1 == self.amplitudes.len() {
                ""
            } else {
                ","
            };
            let _ = writeln!(s, "    [{re:.16e}, {im:.16e}]{sep}");
        }
        s.push_str("  ]\n}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statecore::random_pure_state;

    #[test]
    fn text_round_trip_is_bit_exact() {
        let psi = random_pure_state(4, 3).unwrap();
        let f = StateFile::from_state(&psi, Some("r4"));
        let back = StateFile::parse(&f.to_text()).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_state(12).unwrap(), psi);
    }

    #[test]
    fn validation() {
        let f = StateFile {
            n: 3,
            label: None,
            amplitudes: vec![[1.0, 0.0]; 7],
        };
        assert!(f.to_state(12).unwrap_err().contains("length error"));
        let z = StateFile {
            n: 1,
            label: None,
            amplitudes: vec![[0.0, 0.0]; 2],
        };
        assert!(z.to_state(12).unwrap_err().contains("zero"));
        let big = StateFile {
            n: 5,
            label: None,
            amplitudes: vec![[0.0, 0.0]; 32],
        };
        assert!(big.to_state(4).unwrap_err().contains("limit"));
        assert!(StateFile::parse("{\"n\": 1}").is_err());
    }
}
