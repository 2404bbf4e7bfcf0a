//! Three-qubit classification by support pattern.
//!
//! Amplitudes of `a|000> + b|001> + ... + h|111>` are indexed `0..8` by
//! letter. For a part `Ai`, the eight coefficients form a 2x4 matrix whose
//! rows are the two values of qubit `i`; the part factors out iff that
//! matrix has rank one, i.e. every 2x2 minor vanishes. Which minors can
//! vanish is decided by the support alone, except when two or more columns
//! are fully populated, in which case the row is conditional on coefficient
//! equalities such as `ad = bc`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::factorize::{finest_factorization, Partition};
use crate::error::{Error, Result};
use crate::paulispace::polarized_vector;
use crate::sepcrit::Thresholds;
use crate::statecore::{PureState, QubitLabel};

const LETTERS: &[u8; 8] = b"abcdefgh";
const PART_NAMES: [&str; 3] = ["A", "B", "C"];

/// Set of nonzero coefficients, bit `k` for letter `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Support(u8);

impl Support {
    pub fn new(mask: u8) -> Result<Self> {
        if mask == 0 {
            return Err(Error::InvalidArgument("support must be nonempty".into()));
        }
        Ok(Self(mask))
    }

    /// Support of a state: indices whose amplitude magnitude exceeds `tol`.
    pub fn of_state(state: &PureState, tol: f64) -> Result<Self> {
        if state.n() != 3 {
            return Err(Error::InvalidArgument(format!(
                "need 3 qubits, got {}",
                state.n()
            )));
        }
        let mask = (0..8)
            .filter(|&k| state.amplitude(k).norm() > tol)
            .fold(0u8, |m, k| m | 1 << k);
        Self::new(mask)
    }

    pub fn from_letters(s: &str) -> Result<Self> {
        let mut mask = 0u8;
        for ch in s.bytes() {
            let k = LETTERS.iter().position(|&l| l == ch).ok_or_else(|| {
                Error::InvalidArgument(format!("bad coefficient letter {:?}", ch as char))
            })?;
            mask |= 1 << k;
        }
        Self::new(mask)
    }

    /// All 255 nonempty supports ordered by size, then lexicographically by
    /// letters.
    pub fn all() -> Vec<Support> {
        let mut v: Vec<Support> = (1..=255u8).map(Support).collect();
        v.sort_by_key(|s| (s.len(), s.letters()));
        v
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, k: usize) -> bool {
        self.0 >> k & 1 == 1
    }

    pub fn indices(self) -> Vec<usize> {
        (0..8).filter(|&k| self.contains(k)).collect()
    }

    pub fn letters(self) -> String {
        self.indices().iter().map(|&k| LETTERS[k] as char).collect()
    }

    /// The support is a Cartesian product of per-qubit value sets.
    fn is_product(self) -> bool {
        let sets = self.value_sets();
        let count: usize = sets.iter().map(|s| s.len()).product();
        count == self.len()
    }

    fn value_sets(self) -> [Vec<usize>; 3] {
        std::array::from_fn(|q| {
            let shift = 2 - q;
            let mut vals: Vec<usize> = self.indices().iter().map(|k| k >> shift & 1).collect();
            vals.sort();
            vals.dedup();
            vals
        })
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters: Vec<String> = self.letters().chars().map(String::from).collect();
        write!(f, "({})", letters.join(","))
    }
}

/// `x y = z w` between coefficient letters, stored in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MinorCondition {
    pub lhs: (u8, u8),
    pub rhs: (u8, u8),
}

impl MinorCondition {
    pub fn new(lhs: (u8, u8), rhs: (u8, u8)) -> Self {
        let sort = |(x, y): (u8, u8)| if x <= y { (x, y) } else { (y, x) };
        let (l, r) = (sort(lhs), sort(rhs));
        if l <= r {
            Self { lhs: l, rhs: r }
        } else {
            Self { lhs: r, rhs: l }
        }
    }

    /// `p0 q1 = q0 p1` for columns `p`, `q` of a part matrix.
    fn of_columns(p: (u8, u8), q: (u8, u8)) -> Self {
        Self::new((p.0, q.1), (q.0, p.1))
    }

    pub fn minor(&self, coeffs: &[Complex64]) -> Complex64 {
        let c = |k: u8| coeffs[k as usize];
        c(self.lhs.0) * c(self.lhs.1) - c(self.rhs.0) * c(self.rhs.1)
    }

    pub fn holds(&self, coeffs: &[Complex64], tol: f64) -> bool {
        self.minor(coeffs).norm() < tol
    }
}

impl fmt::Display for MinorCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = |k: u8| LETTERS[k as usize] as char;
        write!(
            f,
            "{}{}={}{}",
            l(self.lhs.0),
            l(self.lhs.1),
            l(self.rhs.0),
            l(self.rhs.1)
        )
    }
}

impl FromStr for MinorCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad condition {s:?}"));
        let (l, r) = s.trim().split_once('=').ok_or_else(bad)?;
        let pair = |t: &str| -> Result<(u8, u8)> {
            let idx: Vec<u8> = t
                .bytes()
                .map(|ch| {
                    LETTERS
                        .iter()
                        .position(|&x| x == ch)
                        .map(|k| k as u8)
                        .ok_or_else(bad)
                })
                .collect::<Result<_>>()?;
            match idx.as_slice() {
                [x, y] => Ok((*x, *y)),
                _ => Err(bad()),
            }
        };
        Ok(Self::new(pair(l)?, pair(r)?))
    }
}

/// Columns of the 2x4 coefficient matrix of part `p` (1..=3): each column
/// is `(index with qubit p = 0, index with qubit p = 1)`, ordered by the
/// remaining two qubits.
pub fn part_columns(p: usize) -> [(u8, u8); 4] {
    let bit = 1u8 << (3 - p);
    let lows: Vec<u8> = (0..8u8).filter(|k| k & bit == 0).collect();
    std::array::from_fn(|c| (lows[c], lows[c] | bit))
}

/// The six 2x2 minors of part `p`, in column-pair order.
pub fn part_minors(p: usize) -> Vec<MinorCondition> {
    let cols = part_columns(p);
    let mut out = Vec::with_capacity(6);
    for i in 0..4 {
        for j in i + 1..4 {
            out.push(MinorCondition::of_columns(cols[i], cols[j]));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartStatus {
    /// Separable for every coefficient choice on the support.
    Always,
    /// Separable for no coefficient choice on the support.
    Never,
    /// Separable iff all listed equalities hold.
    Conditional(Vec<MinorCondition>),
}

/// Status of part `p` for generic nonzero coefficients on `support`.
pub fn part_status(support: Support, p: usize) -> PartStatus {
    let cols = part_columns(p);
    let (mut full, mut top, mut bottom) = (Vec::new(), 0, 0);
    for &(lo, hi) in &cols {
        match (support.contains(lo as usize), support.contains(hi as usize)) {
            (true, true) => full.push((lo, hi)),
            (true, false) => top += 1,
            (false, true) => bottom += 1,
            (false, false) => {}
        }
    }
    let partial = top + bottom;
    if (top > 0 && bottom > 0) || (!full.is_empty() && partial > 0) {
        return PartStatus::Never;
    }
    if full.len() <= 1 {
        return PartStatus::Always;
    }
    let first = full[0];
    PartStatus::Conditional(
        full[1..]
            .iter()
            .map(|&q| MinorCondition::of_columns(first, q))
            .collect(),
    )
}

/// Three-qubit class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Class3 {
    FullySeparable,
    /// The given part (1..=3) factors out; the other two are entangled.
    PartSeparable(u8),
    FullyEntangled,
}

impl Class3 {
    fn from_separable_parts(parts: &[bool; 3]) -> Self {
        match parts.iter().filter(|&&s| s).count() {
            0 => Class3::FullyEntangled,
            1 => Class3::PartSeparable(parts.iter().position(|&s| s).unwrap() as u8 + 1),
            _ => Class3::FullySeparable,
        }
    }

    pub fn from_partition(p: &Partition) -> Result<Self> {
        match p.0.as_slice() {
            [_, _, _] => Ok(Class3::FullySeparable),
            [one] if one.len() == 3 => Ok(Class3::FullyEntangled),
            [a, b] => {
                let single = if a.len() == 1 { a[0] } else { b[0] };
                Ok(Class3::PartSeparable(single as u8))
            }
            _ => Err(Error::InvalidArgument(format!(
                "not a three-qubit partition: {p:?}"
            ))),
        }
    }

    /// Short token used in golden files.
    pub fn token(self) -> String {
        match self {
            Class3::FullySeparable => "separable".into(),
            Class3::PartSeparable(p) => format!("{}-part", PART_NAMES[p as usize - 1]),
            Class3::FullyEntangled => "entangled".into(),
        }
    }
}

impl fmt::Display for Class3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Class3::FullySeparable => f.write_str("fully separable"),
            Class3::PartSeparable(p) => {
                let rest: String = (1..=3u8)
                    .filter(|q| q != p)
                    .map(|q| PART_NAMES[q as usize - 1])
                    .collect();
                write!(f, "{}-part | {}", PART_NAMES[*p as usize - 1], rest)
            }
            Class3::FullyEntangled => f.write_str("fully entangled"),
        }
    }
}

impl FromStr for Class3 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "separable" => Ok(Class3::FullySeparable),
            "entangled" => Ok(Class3::FullyEntangled),
            "A-part" => Ok(Class3::PartSeparable(1)),
            "B-part" => Ok(Class3::PartSeparable(2)),
            "C-part" => Ok(Class3::PartSeparable(3)),
            other => Err(Error::InvalidArgument(format!("unknown class {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub conditions: Vec<MinorCondition>,
    pub class: Class3,
}

/// One table row: the class for generic coefficients and the special
/// classes reached when coefficient equalities hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportRule {
    pub support: Support,
    pub parts: [PartStatus; 3],
    pub generic: Class3,
    pub branches: Vec<Branch>,
}

impl SupportRule {
    pub fn is_conditional(&self) -> bool {
        !self.branches.is_empty()
    }
}

pub fn support_rule_3q(support: Support) -> SupportRule {
    let parts: [PartStatus; 3] = std::array::from_fn(|i| part_status(support, i + 1));
    let always: [bool; 3] = std::array::from_fn(|i| parts[i] == PartStatus::Always);
    let generic = Class3::from_separable_parts(&always);

    let mut sets: Vec<&Vec<MinorCondition>> = Vec::new();
    for p in &parts {
        if let PartStatus::Conditional(c) = p {
            if !sets.contains(&c) {
                sets.push(c);
            }
        }
    }
    let mut branches: Vec<Branch> = sets
        .iter()
        .map(|set| {
            let sep: [bool; 3] = std::array::from_fn(|i| {
                always[i] || matches!(&parts[i], PartStatus::Conditional(c) if c == *set)
            });
            Branch {
                conditions: (*set).clone(),
                class: Class3::from_separable_parts(&sep),
            }
        })
        .collect();
    if sets.len() > 1 {
        let mut all: Vec<MinorCondition> = sets.iter().flat_map(|s| s.iter().copied()).collect();
        all.sort();
        all.dedup();
        branches.push(Branch {
            conditions: all,
            class: Class3::FullySeparable,
        });
    }
    SupportRule {
        support,
        parts,
        generic,
        branches,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportClass {
    pub support: Support,
    pub class: Class3,
    /// Row depends on coefficient equalities.
    pub conditional: bool,
    /// Every equality that was evaluated, with its outcome.
    pub conditions: Vec<(MinorCondition, bool)>,
}

/// Classifies a support, evaluating the row's coefficient equalities when
/// the row is conditional.
pub fn classify_support_3q(
    support: Support,
    coefficients: Option<&[Complex64]>,
    tol: f64,
) -> Result<SupportClass> {
    let rule = support_rule_3q(support);
    if !rule.is_conditional() {
        return Ok(SupportClass {
            support,
            class: rule.generic,
            conditional: false,
            conditions: Vec::new(),
        });
    }
    let coeffs = coefficients.ok_or_else(|| Error::CoefficientsRequired(support.to_string()))?;
    if coeffs.len() != 8 {
        return Err(Error::DimensionMismatch {
            expected: 8,
            got: coeffs.len(),
        });
    }
    for (k, c) in coeffs.iter().enumerate() {
        let on = support.contains(k);
        if on && c.norm() <= tol {
            return Err(Error::InvalidArgument(format!(
                "coefficient {} is zero but inside {support}",
                LETTERS[k] as char
            )));
        }
        if !on && c.norm() > tol {
            return Err(Error::InvalidArgument(format!(
                "coefficient {} is nonzero but outside {support}",
                LETTERS[k] as char
            )));
        }
    }
    let mut evaluated = Vec::new();
    let sep: [bool; 3] = std::array::from_fn(|i| match &rule.parts[i] {
        PartStatus::Always => true,
        PartStatus::Never => false,
        PartStatus::Conditional(cs) => {
            let mut ok = true;
            for c in cs {
                let h = c.holds(coeffs, tol);
                if !evaluated
                    .iter()
                    .any(|(e, _): &(MinorCondition, bool)| e == c)
                {
                    evaluated.push((*c, h));
                }
                ok &= h;
            }
            ok
        }
    });
    Ok(SupportClass {
        support,
        class: Class3::from_separable_parts(&sep),
        conditional: true,
        conditions: evaluated,
    })
}

/// Per-part check that the six minors of each part vanish exactly when
/// the part's Bloch vector has unit length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartConditionReport {
    pub part: usize,
    pub minors: Vec<(MinorCondition, f64)>,
    pub minors_hold: bool,
    pub xi_sq: f64,
    pub xi_unit: bool,
}

impl PartConditionReport {
    pub fn consistent(&self) -> bool {
        self.minors_hold == self.xi_unit
    }
}

pub fn verify_pairwise_conditions_3q(
    state: &PureState,
    tol: f64,
) -> Result<Vec<PartConditionReport>> {
    if state.n() != 3 {
        return Err(Error::InvalidArgument(format!(
            "need 3 qubits, got {}",
            state.n()
        )));
    }
    let amps = state.amplitudes();
    (1..=3)
        .map(|p| {
            let minors: Vec<(MinorCondition, f64)> = part_minors(p)
                .into_iter()
                .map(|c| (c, c.minor(amps).norm()))
                .collect();
            let xi_sq = polarized_vector(state, QubitLabel::new(p)?)?.norm_sq();
            Ok(PartConditionReport {
                part: p,
                minors_hold: minors.iter().all(|(_, v)| *v < tol),
                minors,
                xi_sq,
                xi_unit: 1.0 - xi_sq < tol,
            })
        })
        .collect()
}

fn nonzero_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    loop {
        let z = Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
        if z.norm() > 0.05 {
            return z;
        }
    }
}

/// Random nonzero coefficients on the support.
pub fn draw_generic<R: Rng + ?Sized>(support: Support, rng: &mut R) -> PureState {
    let amps: Vec<Complex64> = (0..8)
        .map(|k| {
            if support.contains(k) {
                nonzero_gaussian(rng)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    PureState::normalized(amps).expect("nonempty support")
}

/// Coefficients on the support satisfying the branch equalities.
///
/// A single-part branch rescales the second entry of every fully populated
/// column of that part's matrix to be proportional to the first such
/// column; the all-conditions branch draws a product state.
pub fn draw_branch<R: Rng + ?Sized>(
    rule: &SupportRule,
    branch: &Branch,
    rng: &mut R,
) -> Result<PureState> {
    let support = rule.support;
    let part = rule
        .parts
        .iter()
        .position(|p| matches!(p, PartStatus::Conditional(c) if *c == branch.conditions));
    match part {
        Some(i) => {
            let mut amps: Vec<Complex64> = draw_generic(support, rng).amplitudes().to_vec();
            let full: Vec<(u8, u8)> = part_columns(i + 1)
                .into_iter()
                .filter(|&(lo, hi)| support.contains(lo as usize) && support.contains(hi as usize))
                .collect();
            let (p0, p1) = full[0];
            let ratio = amps[p1 as usize] / amps[p0 as usize];
            for &(lo, hi) in &full[1..] {
                amps[hi as usize] = amps[lo as usize] * ratio;
            }
            PureState::normalized(amps)
        }
        None => {
            if !support.is_product() {
                return Err(Error::InvalidArgument(format!(
                    "{support} has no product branch"
                )));
            }
            let sets = support.value_sets();
            let qubits: Vec<[Complex64; 2]> = sets
                .iter()
                .map(|vals| {
                    let mut q = [Complex64::new(0.0, 0.0); 2];
                    for &v in vals {
                        q[v] = nonzero_gaussian(rng);
                    }
                    q
                })
                .collect();
            let amps = (0..8)
                .map(|k| qubits[0][k >> 2 & 1] * qubits[1][k >> 1 & 1] * qubits[2][k & 1])
                .collect();
            PureState::normalized(amps)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub rule: SupportRule,
    /// Random draws classified through the factorization pipeline.
    pub draws: usize,
    /// Draws whose numeric class differed from the rule, as text.
    pub mismatches: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table3 {
    pub rows: Vec<TableRow>,
}

/// Group key for one line of the reference table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupKey {
    pub size: usize,
    pub generic: Class3,
    pub branch_classes: Vec<Class3>,
}

impl Table3 {
    pub fn mismatch_count(&self) -> usize {
        self.rows.iter().map(|r| r.mismatches.len()).sum()
    }

    /// Supports per `(size, generic class, branch classes)`.
    pub fn group_counts(&self) -> Vec<(GroupKey, usize)> {
        let mut map = std::collections::BTreeMap::new();
        for r in &self.rows {
            let key = GroupKey {
                size: r.rule.support.len(),
                generic: r.rule.generic,
                branch_classes: r.rule.branches.iter().map(|b| b.class).collect(),
            };
            *map.entry(key).or_insert(0usize) += 1;
        }
        map.into_iter().collect()
    }

    pub fn row(&self, support: Support) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.rule.support == support)
    }
}

/// Builds every row and checks each one numerically with `draws` random
/// coefficient sets per generic case and per branch.
pub fn generate_table_3q(seed: u64, draws: usize, th: &Thresholds) -> Result<Table3> {
    let mut rows = Vec::with_capacity(255);
    for support in Support::all() {
        let rule = support_rule_3q(support);
        let mut rng = ChaCha8Rng::seed_from_u64(
            seed ^ u64::from(support.mask()).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        let mut mismatches = Vec::new();
        let mut count = 0;
        let check = |state: PureState,
                     expect: Class3,
                     what: &str,
                     mismatches: &mut Vec<String>|
         -> Result<()> {
            let tree = finest_factorization(&state, th)?;
            let got = Class3::from_partition(&tree.partition())?;
            if got != expect {
                mismatches.push(format!("{what}: expected {expect}, pipeline gave {got}"));
            }
            let looked_up = classify_support_3q(support, Some(state.amplitudes()), th.criterion)?;
            if looked_up.class != expect {
                mismatches.push(format!(
                    "{what}: expected {expect}, lookup gave {}",
                    looked_up.class
                ));
            }
            Ok(())
        };
        for _ in 0..draws {
            check(
                draw_generic(support, &mut rng),
                rule.generic,
                "generic",
                &mut mismatches,
            )?;
            count += 1;
        }
        for b in &rule.branches {
            for _ in 0..draws {
                let s = draw_branch(&rule, b, &mut rng)?;
                let what: Vec<String> = b.conditions.iter().map(|c| c.to_string()).collect();
                check(
                    s,
                    b.class,
                    &format!("if {}", what.join(",")),
                    &mut mismatches,
                )?;
                count += 1;
            }
        }
        rows.push(TableRow {
            rule,
            draws: count,
            mismatches,
        });
    }
    Ok(Table3 { rows })
}

/// Expected row from a golden file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenRow {
    pub support: Support,
    pub generic: Class3,
    pub branches: Vec<Branch>,
}

/// Parses the golden table format:
///
/// ```text
/// <size> | <letter sets or *> | <class> [| <cond,cond => class ; ...>]
/// ```
///
/// `*` stands for every support of that size not listed on another line,
/// and `all` as a condition list means the union of the row's other
/// branch conditions.
pub fn parse_golden(text: &str) -> Result<Vec<GoldenRow>> {
    struct Line {
        size: usize,
        supports: Option<Vec<Support>>,
        generic: Class3,
        branches: Vec<(Option<Vec<MinorCondition>>, Class3)>,
    }
    let mut lines = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| Error::InvalidArgument(format!("golden line {}: {m}", no + 1));
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        if fields.len() < 3 || fields.len() > 4 {
            return Err(err("expected 3 or 4 fields"));
        }
        let size: usize = fields[0].parse().map_err(|_| err("bad size"))?;
        let supports = if fields[1] == "*" {
            None
        } else {
            let v = fields[1]
                .split_whitespace()
                .map(Support::from_letters)
                .collect::<Result<Vec<_>>>()?;
            if v.iter().any(|s| s.len() != size) {
                return Err(err("support size mismatch"));
            }
            Some(v)
        };
        let generic: Class3 = fields[2].parse()?;
        let mut branches = Vec::new();
        if let Some(b) = fields.get(3) {
            for part in b.split(';').map(str::trim).filter(|p| !p.is_empty()) {
                let (conds, class) = part
                    .split_once("=>")
                    .ok_or_else(|| err("branch needs =>"))?;
                let conds = conds.trim();
                let conds = if conds == "all" {
                    None
                } else {
                    Some(
                        conds
                            .split(',')
                            .map(str::parse)
                            .collect::<Result<Vec<MinorCondition>>>()?,
                    )
                };
                branches.push((conds, class.parse()?));
            }
        }
        lines.push(Line {
            size,
            supports,
            generic,
            branches,
        });
    }
    let listed: Vec<Support> = lines
        .iter()
        .filter_map(|l| l.supports.clone())
        .flatten()
        .collect();
    let mut out = Vec::new();
    for l in &lines {
        let supports = match &l.supports {
            Some(v) => v.clone(),
            None => Support::all()
                .into_iter()
                .filter(|s| s.len() == l.size && !listed.contains(s))
                .collect(),
        };
        for s in supports {
            let mut branches: Vec<Branch> = l
                .branches
                .iter()
                .filter_map(|(c, class)| {
                    c.as_ref().map(|c| Branch {
                        conditions: c.clone(),
                        class: *class,
                    })
                })
                .collect();
            if let Some((_, class)) = l.branches.iter().find(|(c, _)| c.is_none()) {
                let mut all: Vec<MinorCondition> = branches
                    .iter()
                    .flat_map(|b| b.conditions.iter().copied())
                    .collect();
                all.sort();
                all.dedup();
                branches.push(Branch {
                    conditions: all,
                    class: *class,
                });
            }
            out.push(GoldenRow {
                support: s,
                generic: l.generic,
                branches,
            });
        }
    }
    Ok(out)
}

/// The reference three-qubit table in golden format.
pub const BUNDLED_GOLDEN: &str = include_str!("../../data/table3_golden.txt");

fn branch_set(branches: &[Branch]) -> Vec<(Vec<MinorCondition>, Class3)> {
    let mut v: Vec<_> = branches
        .iter()
        .map(|b| {
            let mut c = b.conditions.clone();
            c.sort();
            (c, b.class)
        })
        .collect();
    v.sort();
    v
}

/// Differences between a generated table and golden rows.
pub fn compare_golden(table: &Table3, golden: &[GoldenRow]) -> Vec<String> {
    let mut out = Vec::new();
    for g in golden {
        let Some(row) = table.row(g.support) else {
            out.push(format!("{}: missing from generated table", g.support));
            continue;
        };
        if row.rule.generic != g.generic {
            out.push(format!(
                "{}: generic class {} but golden says {}",
                g.support, row.rule.generic, g.generic
            ));
        }
        if branch_set(&row.rule.branches) != branch_set(&g.branches) {
            out.push(format!(
                "{}: conditional branches differ from golden",
                g.support
            ));
        }
    }
    for row in &table.rows {
        if !golden.iter().any(|g| g.support == row.rule.support) {
            out.push(format!("{}: not in golden", row.rule.support));
        }
    }
    let mut seen = std::collections::HashSet::new();
    for g in golden {
        if !seen.insert(g.support) {
            out.push(format!("{}: listed twice in golden", g.support));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(l: &str) -> Support {
        Support::from_letters(l).unwrap()
    }

    #[test]
    fn columns_and_minors_follow_reference_order() {
        assert_eq!(part_columns(1), [(0, 4), (1, 5), (2, 6), (3, 7)]);
        let names = |p| {
            part_minors(p)
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(
            names(1),
            ["af=be", "ag=ce", "ah=de", "bg=cf", "bh=df", "ch=dg"]
        );
        assert_eq!(
            names(2),
            ["ad=bc", "ag=ce", "ah=cf", "bg=de", "bh=df", "eh=fg"]
        );
        assert_eq!(
            names(3),
            ["ad=bc", "af=be", "ah=bg", "cf=de", "ch=dg", "eh=fg"]
        );
    }

    #[test]
    fn condition_round_trip_text() {
        let c: MinorCondition = "be=af".parse().unwrap();
        assert_eq!(c.to_string(), "af=be");
        assert!("a=b".parse::<MinorCondition>().is_err());
    }

    #[test]
    fn examples() {
        let r = classify_support_3q(s("a"), None, 1e-9).unwrap();
        assert_eq!(r.class, Class3::FullySeparable);
        let r = classify_support_3q(s("ah"), None, 1e-9).unwrap();
        assert_eq!(r.class, Class3::FullyEntangled);
        let r = classify_support_3q(s("ag"), None, 1e-9).unwrap();
        assert_eq!(r.class.to_string(), "C-part | AB");

        assert!(matches!(
            classify_support_3q(s("abcd"), None, 1e-9),
            Err(Error::CoefficientsRequired(_))
        ));
        let c = |x: f64| Complex64::new(x, 0.0);
        let z = c(0.0);
        // ad = bc: (|0> (x) (|0> + |1>) (x) (|0> + 2|1>)) unnormalized
        let sep = [c(1.0), c(2.0), c(1.0), c(2.0), z, z, z, z];
        assert_eq!(
            classify_support_3q(s("abcd"), Some(&sep), 1e-9)
                .unwrap()
                .class,
            Class3::FullySeparable
        );
        let ent = [c(1.0), c(2.0), c(3.0), c(4.0), z, z, z, z];
        assert_eq!(
            classify_support_3q(s("abcd"), Some(&ent), 1e-9)
                .unwrap()
                .class,
            Class3::PartSeparable(1)
        );
        let off = [c(1.0), c(2.0), c(3.0), c(4.0), c(1.0), z, z, z];
        assert!(classify_support_3q(s("abcd"), Some(&off), 1e-9).is_err());
    }

    #[test]
    fn eight_support_has_all_branches() {
        let r = support_rule_3q(s("abcdefgh"));
        assert_eq!(r.generic, Class3::FullyEntangled);
        let classes: Vec<Class3> = r.branches.iter().map(|b| b.class).collect();
        assert_eq!(
            classes,
            [
                Class3::PartSeparable(1),
                Class3::PartSeparable(2),
                Class3::PartSeparable(3),
                Class3::FullySeparable
            ]
        );
    }

    #[test]
    fn all_supports_enumerated() {
        let all = Support::all();
        assert_eq!(all.len(), 255);
        assert_eq!(all[0], s("a"));
        assert_eq!(all[254], s("abcdefgh"));
    }

    #[test]
    fn ghz_breaks_ah_de() {
        let rep = verify_pairwise_conditions_3q(&PureState::ghz(3).unwrap(), 1e-9).unwrap();
        let (c, v) = rep[0].minors[2];
        assert_eq!(c.to_string(), "ah=de");
        assert!((v - 0.5).abs() < 1e-12);
        assert!(!rep[0].minors_hold);
        assert!(rep.iter().all(|r| r.consistent()));

        let rep = verify_pairwise_conditions_3q(&PureState::basis(3, 0).unwrap(), 1e-9).unwrap();
        assert!(rep.iter().all(|r| r.minors_hold && r.xi_unit));
    }

    #[test]
    fn golden_parser_expands_wildcards() {
        let g = parse_golden("2 | ab | separable\n2 | * | entangled\n").unwrap();
        assert_eq!(g.len(), 28);
        assert_eq!(g[0].support, s("ab"));
        assert!(parse_golden("2 | abc | separable").is_err());
        assert!(parse_golden("2 | ab").is_err());
    }
}
