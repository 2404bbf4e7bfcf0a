//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on input or usage errors, 2 when the
//! criterion and the Schmidt oracle disagree or a golden comparison fails.

mod report;
mod statefile;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{
    compare_golden, generate_table_3q, parse_golden, random_block_product, Table3, BUNDLED_GOLDEN,
    MAX_FACTORIZE_QUBITS,
};
use crate::paulispace::{coherent_vector, max_norm_sq, polarized_vector};
use crate::sepcrit::{all_blocks, block_separable, schmidt_oracle, Thresholds};
use crate::statecore::{
    random_pure_state_with, reduced_density, PureState, QubitLabel, Subsystem, TOL,
};

use report::clean;
pub use report::{digest, summarize, BlockEntry, FactorEntry, PartEntry, Report};
pub use statefile::StateFile;

/// Default for `SEPSCAN_MAX_QUBITS`.
pub const DEFAULT_MAX_QUBITS: usize = 12;
pub const MAX_FUZZ_QUBITS: usize = 8;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_DISAGREE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "sepscan",
    version,
    about = "Partial separability of pure multi-qubit states"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Absolute tolerance for separability decisions.
    #[arg(long, global = true, default_value_t = TOL)]
    tolerance: f64,
    /// Seed for random draws.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify the state in a state file.
    Classify { path: PathBuf },
    /// Regenerate the three-qubit classification table.
    Table3 {
        /// Compare against a golden file (bundled table if no path given).
        #[arg(long, num_args = 0..=1, value_name = "PATH")]
        golden: Option<Option<PathBuf>>,
        /// Random coefficient draws per row and branch.
        #[arg(long, default_value_t = 100)]
        draws: usize,
    },
    /// Coherent vector of a block, e.g. `3,4`.
    Coherent { path: PathBuf, block: String },
    /// Criterion vs oracle on random and block-product states.
    Fuzz {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
    },
}

struct Failure {
    code: i32,
    message: String,
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Disagreement { .. } => Failure {
                code: EXIT_DISAGREE,
                message: e.to_string(),
            },
            _ => input_error(e.to_string()),
        }
    }
}

/// Output of a command and its exit code.
struct Done {
    text: String,
    code: i32,
}

/// Runs the CLI with the given arguments (including the program name) and
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let max_qubits = std::env::var("SEPSCAN_MAX_QUBITS").ok();
    run_with_limit(args, max_qubits.as_deref(), out, err)
}

/// Like [`run`], with the qubit limit passed explicitly instead of read from
/// `SEPSCAN_MAX_QUBITS`.
pub fn run_with_limit<I, T>(
    args: I,
    max_qubits: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_INPUT,
            };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match dispatch(&cli, max_qubits) {
        Ok(done) => {
            let _ = out.write_all(done.text.as_bytes());
            done.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, max_qubits: Option<&str>) -> Result<Done, Failure> {
    let g = &cli.global;
    if !(g.tolerance.is_finite() && g.tolerance > 0.0) {
        return Err(input_error(format!(
            "tolerance must be positive, got {}",
            g.tolerance
        )));
    }
    let th = Thresholds::with_tolerance(g.tolerance);
    let limit = match max_qubits {
        None => DEFAULT_MAX_QUBITS,
        Some(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&k| k >= 1)
            .ok_or_else(|| {
                input_error(format!(
                    "SEPSCAN_MAX_QUBITS must be a positive integer, got {v:?}"
                ))
            })?,
    }
    .min(MAX_FACTORIZE_QUBITS);
    match &cli.command {
        Command::Classify { path } => classify(path, g, &th, limit),
        Command::Table3 { golden, draws } => table3(golden.as_ref(), *draws, g, &th),
        Command::Coherent { path, block } => coherent(path, block, g, limit),
        Command::Fuzz { n, trials } => fuzz(*n, *trials, g, &th),
    }
}

fn load(path: &Path, limit: usize) -> Result<(StateFile, PureState), Failure> {
    let file = StateFile::read(path).map_err(input_error)?;
    let state = file.to_state(limit).map_err(input_error)?;
    Ok((file, state))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn classify(
    path: &Path,
    g: &GlobalOpts,
    th: &Thresholds,
    limit: usize,
) -> Result<Done, Failure> {
    let (file, state) = load(path, limit)?;
    let report = Report::build(&state, file.label.clone(), th)?;
    let text = if g.json {
        let mut s = report.to_json();
        s.push('\n');
        s
    } else {
        report.to_text()
    };
    Ok(Done {
        text,
        code: if report.disagreement {
            EXIT_DISAGREE
        } else {
            EXIT_OK
        },
    })
}

/// Block argument: comma-separated 1-based labels.
pub fn parse_block(text: &str, n: usize) -> Result<Subsystem, String> {
    let labels = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad block {text:?}: expected labels like 1,3"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let block = Subsystem::new(labels).map_err(|e| format!("bad block {text:?}: {e}"))?;
    block
        .check_within(n)
        .map_err(|e| format!("bad block {text:?}: {e}"))?;
    Ok(block)
}

#[derive(Serialize)]
struct CoherentOut {
    block: Subsystem,
    components: Vec<(String, f64)>,
    norm_sq: f64,
    max_norm_sq: f64,
    residual: f64,
}

/// Drops round-off sign on values that print as zero.
fn pauli_name(mu: &[usize]) -> String {
    mu.iter().map(|&k| ['I', 'X', 'Y', 'Z'][k]).collect()
}

fn coherent(path: &Path, block_arg: &str, g: &GlobalOpts, limit: usize) -> Result<Done, Failure> {
    let (_, state) = load(path, limit)?;
    let block = parse_block(block_arg, state.n()).map_err(input_error)?;
    let xi = if block.len() == 1 {
        polarized_vector(&state, block.labels()[0])?
    } else {
        coherent_vector(&reduced_density(&state, &block)?)?
    };
    let components: Vec<(String, f64)> = xi
        .components()
        .iter()
        .enumerate()
        .map(|(s, &x)| (pauli_name(&xi.index_of(s)), x))
        .collect();
    let out = CoherentOut {
        norm_sq: xi.norm_sq(),
        max_norm_sq: max_norm_sq(block.len()),
        residual: max_norm_sq(block.len()) - xi.norm_sq(),
        block,
        components,
    };
    let text = if g.json {
        json(&out)
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "block {}", out.block);
        let _ = writeln!(s, "components ({}):", out.components.len());
        for (name, x) in &out.components {
            let _ = writeln!(s, "  {name:<8} {:+.12}", clean(*x));
        }
        let _ = writeln!(s, "norm^2   {:.12}", clean(out.norm_sq));
        let _ = writeln!(s, "max      {:.12}", out.max_norm_sq);
        let _ = writeln!(s, "residual {:.12}", clean(out.residual));
        s
    };
    Ok(Done {
        text,
        code: EXIT_OK,
    })
}

#[derive(Serialize)]
struct TableOut<'a> {
    rows: Vec<TableLine>,
    draws: usize,
    mismatches: Vec<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    golden_mismatches: Option<Vec<String>>,
}

#[derive(Serialize)]
struct TableLine {
    support: String,
    class: String,
    branches: Vec<(Vec<String>, String)>,
}

fn table_lines(table: &Table3) -> Vec<TableLine> {
    table
        .rows
        .iter()
        .map(|r| TableLine {
            support: r.rule.support.to_string(),
            class: r.rule.generic.to_string(),
            branches: r
                .rule
                .branches
                .iter()
                .map(|b| {
                    (
                        b.conditions.iter().map(|c| c.to_string()).collect(),
                        b.class.to_string(),
                    )
                })
                .collect(),
        })
        .collect()
}

fn table3(
    golden: Option<&Option<PathBuf>>,
    draws: usize,
    g: &GlobalOpts,
    th: &Thresholds,
) -> Result<Done, Failure> {
    let golden_rows = match golden {
        None => None,
        Some(None) => Some(parse_golden(BUNDLED_GOLDEN)?),
        Some(Some(p)) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| input_error(format!("cannot read {}: {e}", p.display())))?;
            Some(parse_golden(&text)?)
        }
    };
    let table = generate_table_3q(g.seed, draws, th)?;
    let golden_mismatches = golden_rows.map(|rows| compare_golden(&table, &rows));
    let numeric: Vec<&str> = table
        .rows
        .iter()
        .flat_map(|r| r.mismatches.iter().map(String::as_str))
        .collect();
    let total_draws: usize = table.rows.iter().map(|r| r.draws).sum();
    let failed = !numeric.is_empty() || golden_mismatches.as_ref().is_some_and(|m| !m.is_empty());
    let lines = table_lines(&table);
    let text = if g.json {
        json(&TableOut {
            rows: lines,
            draws: total_draws,
            mismatches: numeric,
            golden_mismatches,
        })
    } else {
        let mut s = String::new();
        for l in &lines {
            let _ = write!(s, "{:<20} {}", l.support, l.class);
            for (conds, class) in &l.branches {
                let _ = write!(s, " ; if {}: {}", conds.join(","), class);
            }
            let _ = writeln!(s);
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{} rows, {} numeric draws, {} numeric mismatches",
            lines.len(),
            total_draws,
            numeric.len()
        );
        for m in &numeric {
            let _ = writeln!(s, "  mismatch: {m}");
        }
        if let Some(gm) = &golden_mismatches {
            let _ = writeln!(s, "golden comparison: {} mismatches", gm.len());
            for m in gm {
                let _ = writeln!(s, "  {m}");
            }
        }
        s
    };
    Ok(Done {
        text,
        code: if failed { EXIT_DISAGREE } else { EXIT_OK },
    })
}

#[derive(Serialize)]
struct FuzzOut {
    n: usize,
    trials: usize,
    seed: u64,
    agreeing_trials: usize,
    block_checks: usize,
    disagreements: Vec<String>,
    max_separable_residual: Option<f64>,
    min_entangled_residual: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    two_qubit_spot_checks: Vec<SpotCheck>,
}

#[derive(Serialize)]
struct SpotCheck {
    trial: usize,
    det_abs: f64,
    predicted_xi_sq: f64,
    xi_sq: f64,
    ok: bool,
}

fn fuzz(n: usize, trials: usize, g: &GlobalOpts, th: &Thresholds) -> Result<Done, Failure> {
    if !(2..=MAX_FUZZ_QUBITS).contains(&n) {
        return Err(input_error(format!(
            "n must be in 2..={MAX_FUZZ_QUBITS}, got {n}"
        )));
    }
    if trials == 0 {
        return Err(input_error("trials must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let blocks = all_blocks(n);
    let mut out = FuzzOut {
        n,
        trials,
        seed: g.seed,
        agreeing_trials: 0,
        block_checks: 0,
        disagreements: Vec::new(),
        max_separable_residual: None,
        min_entangled_residual: None,
        two_qubit_spot_checks: Vec::new(),
    };
    for t in 0..trials {
        let random = random_pure_state_with(n, &mut rng)?;
        let (product, _) = random_block_product(n, &mut rng)?;
        let mut ok = true;
        for (kind, state) in [("random", &random), ("product", &product)] {
            for b in &blocks {
                let c = block_separable(state, b, th)?;
                let o = schmidt_oracle(state, b, th)?;
                out.block_checks += 1;
                if c.separable != o.separable {
                    ok = false;
                    out.disagreements.push(format!(
                        "trial {t} {kind} {b}: criterion residual {:e}, s2 {:e}",
                        c.residual,
                        o.second_singular_value()
                    ));
                }
                if o.separable {
                    out.max_separable_residual = Some(
                        out.max_separable_residual
                            .map_or(c.residual, |m| m.max(c.residual)),
                    );
                } else {
                    out.min_entangled_residual = Some(
                        out.min_entangled_residual
                            .map_or(c.residual, |m| m.min(c.residual)),
                    );
                }
            }
        }
        if n == 2 {
            let a = random.amplitudes();
            let det = (a[0] * a[3] - a[1] * a[2]).norm();
            let predicted = 1.0 - 4.0 * det * det;
            let xi_sq = polarized_vector(&random, QubitLabel::new(1)?)?.norm_sq();
            let spot = (predicted - xi_sq).abs() < th.criterion;
            ok &= spot;
            out.two_qubit_spot_checks.push(SpotCheck {
                trial: t,
                det_abs: det,
                predicted_xi_sq: predicted,
                xi_sq,
                ok: spot,
            });
        }
        if ok {
            out.agreeing_trials += 1;
        }
    }
    let code = if out.agreeing_trials == trials {
        EXIT_OK
    } else {
        EXIT_DISAGREE
    };
    let text = if g.json {
        json(&out)
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "n = {n}, trials = {trials}, seed = {}", g.seed);
        if !out.two_qubit_spot_checks.is_empty() {
            let _ = writeln!(
                s,
                "{:>6}  {:>16}  {:>16}  {:>16}  ok",
                "trial", "|ad-bc|", "1-4|ad-bc|^2", "xi_A1^2"
            );
            for c in &out.two_qubit_spot_checks {
                let _ = writeln!(
                    s,
                    "{:>6}  {:>16.12}  {:>16.12}  {:>16.12}  {}",
                    c.trial,
                    c.det_abs,
                    c.predicted_xi_sq,
                    c.xi_sq,
                    if c.ok { "yes" } else { "NO" }
                );
            }
        }
        for d in &out.disagreements {
            let _ = writeln!(s, "disagreement: {d}");
        }
        let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3e}"));
        let _ = writeln!(
            s,
            "agreement: {}/{} trials ({} block checks)",
            out.agreeing_trials, trials, out.block_checks
        );
        let _ = writeln!(
            s,
            "max residual on separable blocks: {}",
            fmt(out.max_separable_residual)
        );
        let _ = writeln!(
            s,
            "min residual on entangled blocks: {}",
            fmt(out.min_entangled_residual)
        );
        s
    };
    Ok(Done { text, code })
}
