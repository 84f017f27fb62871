//! Command-line surface. Exit codes are the machine contract:
//!
//! - `formula`, `construct`, `sweep`: 0 on success, 2 on bad arguments.
//! - `verify`: 0 when no threshold is met (the file is a valid avoiding
//!   coloring), 1 when some color meets its threshold, 2 on parse or
//!   argument failure.
//! - `search`: 0 exhausted with no witness, 1 witness found, 3 node
//!   budget exceeded, 2 on bad arguments.
//! - `certify`: 0 both legs certified, 1 a leg contradicted the formula,
//!   3 a leg ran out of budget, 2 on bad arguments.

use crate::constructions::{best_witness, build_block, build_strip, Optimality, WitnessKind};
use crate::formula::{self, lower_bound_generic, ThresholdVector};
use crate::graph::ColorMatrix;
use crate::matching::{meets_threshold, ColorReport};
use crate::search::{self, certify_value, LegReport, LegStatus, OutcomeKind, SearchConfig};
use clap::{Parser, Subcommand};
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Version stamp carried by every JSON report this binary emits.
pub const SCHEMA_VERSION: u32 = 1;

/// Budget environment override, used when --budget is absent.
pub const BUDGET_ENV: &str = "CM_RAMSEY_BUDGET";

#[derive(Parser)]
#[command(
    name = "cm-ramsey",
    version,
    about = "Exact bipartite Ramsey numbers for connected matchings"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form value for two or three thresholds
    Formula {
        #[arg(value_name = "K", num_args = 2..=3)]
        thresholds: Vec<usize>,
    },
    /// Emit an extremal coloring to stdout
    Construct {
        #[command(subcommand)]
        what: ConstructCmd,
    },
    /// Check a coloring file against per-color thresholds
    Verify {
        file: PathBuf,
        #[arg(value_name = "K", num_args = 2..=3)]
        thresholds: Vec<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Exhaustively search side N for a coloring avoiding all thresholds
    Search {
        n: usize,
        #[arg(value_name = "K", num_args = 2..=3)]
        thresholds: Vec<usize>,
        /// Node budget (default 10^9, or CM_RAMSEY_BUDGET)
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Disable symmetry restrictions (explore the full space)
        #[arg(long)]
        no_symmetry: bool,
        /// Write a found witness to this file (.json for JSON format)
        #[arg(long, value_name = "FILE")]
        witness_out: Option<PathBuf>,
    },
    /// Certify a closed-form value: witness at value-1, exhaustion at value
    Certify {
        #[arg(value_name = "K", num_args = 2..=3)]
        thresholds: Vec<usize>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Tabulate values, bounds, and witness verification over a grid
    Sweep {
        /// Number of colors (2 or 3)
        #[arg(long, default_value_t = 3)]
        arity: usize,
        #[arg(long, default_value_t = 2)]
        min: usize,
        #[arg(long, default_value_t = 10)]
        max: usize,
        /// Verify witnesses only up to this side
        #[arg(long, default_value_t = 40)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Strip coloring of side sum(t) - arity
    Strip {
        #[arg(value_name = "K", num_args = 2..=3)]
        thresholds: Vec<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Block coloring for (k, l, m) with offset i
    Block {
        k: usize,
        l: usize,
        m: usize,
        i: usize,
        #[arg(long)]
        json: bool,
    },
    /// Best known avoiding coloring for the thresholds
    Witness {
        #[arg(value_name = "K", num_args = 2..=3)]
        thresholds: Vec<usize>,
        #[arg(long)]
        json: bool,
    },
}

/// Effective options for search-backed commands after merging flags with
/// the environment.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub budget: u64,
    pub threads: usize,
    pub symmetry: bool,
}

impl RunConfig {
    fn new(budget_flag: Option<u64>, threads: usize, symmetry: bool) -> Self {
        let budget = budget_flag
            .or_else(env_budget)
            .unwrap_or(search::DEFAULT_BUDGET);
        RunConfig {
            budget,
            threads: threads.max(1),
            symmetry,
        }
    }

    fn search_config(&self) -> SearchConfig {
        SearchConfig {
            budget: self.budget,
            threads: self.threads,
            symmetry: self.symmetry,
        }
    }
}

fn env_budget() -> Option<u64> {
    let raw = std::env::var(BUDGET_ENV).ok()?;
    match raw.parse() {
        Ok(v) => Some(v),
        Err(_) => {
            eprintln!("warning: ignoring unparsable {BUDGET_ENV}={raw}");
            None
        }
    }
}

/// Parses real process arguments; clap itself exits 2 on usage errors.
pub fn run_from_args() -> i32 {
    run(Cli::parse())
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Formula { thresholds } => cmd_formula(&thresholds),
        Command::Construct { what } => match what {
            ConstructCmd::Strip { thresholds, json } => cmd_construct_strip(&thresholds, json),
            ConstructCmd::Block { k, l, m, i, json } => cmd_construct_block(k, l, m, i, json),
            ConstructCmd::Witness { thresholds, json } => cmd_construct_witness(&thresholds, json),
        },
        Command::Verify {
            file,
            thresholds,
            json,
        } => cmd_verify(&file, &thresholds, json),
        Command::Search {
            n,
            thresholds,
            budget,
            threads,
            no_symmetry,
            witness_out,
        } => cmd_search(
            n,
            &thresholds,
            RunConfig::new(budget, threads, !no_symmetry),
            witness_out.as_deref(),
        ),
        Command::Certify {
            thresholds,
            budget,
            threads,
        } => cmd_certify(&thresholds, RunConfig::new(budget, threads, true)),
        Command::Sweep {
            arity,
            min,
            max,
            cap,
            json,
        } => cmd_sweep(arity, min, max, cap, json),
    }
}

fn parse_thresholds(raw: &[usize]) -> Result<ThresholdVector, i32> {
    ThresholdVector::new(raw).map_err(|e| {
        eprintln!("error: {e}");
        2
    })
}

// ==== formula ====

fn cmd_formula(raw: &[usize]) -> i32 {
    let t = match parse_thresholds(raw) {
        Ok(t) => t,
        Err(code) => return code,
    };
    match formula::evaluate(&t) {
        (value, None) => println!("{value}"),
        (value, Some(regime)) => println!("{value} ({regime})"),
    }
    0
}

// ==== construct ====

fn emit_matrix(m: &ColorMatrix, json: bool) -> i32 {
    let rendered = if json {
        m.to_json().expect("constructions are complete")
    } else {
        m.to_text().expect("constructions are complete")
    };
    print!("{rendered}");
    if json {
        println!();
    }
    0
}

fn cmd_construct_strip(raw: &[usize], json: bool) -> i32 {
    let t = match parse_thresholds(raw) {
        Ok(t) => t,
        Err(code) => return code,
    };
    emit_matrix(&build_strip(&t), json)
}

fn cmd_construct_block(k: usize, l: usize, m: usize, i: usize, json: bool) -> i32 {
    match build_block(k, l, m, i) {
        Ok(matrix) => emit_matrix(&matrix, json),
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn kind_name(kind: WitnessKind) -> String {
    match kind {
        WitnessKind::Strip => "strip".to_string(),
        WitnessKind::Block { i } => format!("block(i={i})"),
    }
}

fn cmd_construct_witness(raw: &[usize], json: bool) -> i32 {
    let t = match parse_thresholds(raw) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let w = best_witness(&t);
    // Status goes to stderr so stdout stays a clean matrix.
    eprintln!(
        "witness for {t}: {} of side {} against value {}, {}",
        kind_name(w.kind),
        w.matrix.n(),
        w.target,
        match w.optimality {
            Optimality::Optimal => "optimal",
            Optimality::Unknown => "optimality unknown",
        }
    );
    emit_matrix(&w.matrix, json)
}

// ==== verify ====

#[derive(Serialize)]
struct VerifyJson<'a> {
    schema: u32,
    n: usize,
    thresholds: &'a [usize],
    any_met: bool,
    colors: &'a [ColorReport],
}

fn read_matrix(path: &Path) -> Result<ColorMatrix, i32> {
    let raw = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        2
    })?;
    let parsed = if raw.trim_start().starts_with('{') {
        ColorMatrix::from_json(&raw)
    } else {
        ColorMatrix::from_text(&raw)
    };
    parsed.map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        2
    })
}

fn cmd_verify(file: &Path, raw: &[usize], json: bool) -> i32 {
    let t = match parse_thresholds(raw) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let m = match read_matrix(file) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let report = match meets_threshold(&m, &t) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if json {
        let out = VerifyJson {
            schema: SCHEMA_VERSION,
            n: m.n(),
            thresholds: t.entries(),
            any_met: report.any_met,
            colors: &report.colors,
        };
        println!("{}", serde_json::to_string(&out).expect("serializable"));
    } else {
        for (c, r) in report.colors.iter().enumerate() {
            println!(
                "color {c}: best connected matching {} {} threshold {}{}",
                r.best_size,
                if r.met { ">=" } else { "<" },
                r.threshold,
                if r.met { "  MET" } else { "" }
            );
        }
        if report.any_met {
            println!("verdict: meets (some color reaches its threshold)");
        } else {
            println!("verdict: avoids (no color reaches its threshold)");
        }
    }
    i32::from(report.any_met)
}

// ==== search ====

fn outcome_name(kind: OutcomeKind) -> &'static str {
    match kind {
        OutcomeKind::WitnessFound => "WITNESS_FOUND",
        OutcomeKind::ExhaustedNone => "EXHAUSTED_NONE",
        OutcomeKind::BudgetExceeded => "BUDGET_EXCEEDED",
    }
}

fn write_matrix_file(m: &ColorMatrix, path: &Path) -> Result<(), i32> {
    let rendered = if path.extension().is_some_and(|e| e == "json") {
        m.to_json().expect("witness is complete")
    } else {
        m.to_text().expect("witness is complete")
    };
    std::fs::write(path, rendered).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        2
    })
}

fn cmd_search(n: usize, raw: &[usize], rc: RunConfig, witness_out: Option<&Path>) -> i32 {
    let t = match parse_thresholds(raw) {
        Ok(t) => t,
        Err(code) => return code,
    };
    if n == 0 {
        eprintln!("error: side must be at least 1");
        return 2;
    }
    let outcome = search::search_avoiding(n, &t, &rc.search_config());
    println!("outcome: {}", outcome_name(outcome.kind));
    println!(
        "nodes: {}  prunes: {}  elapsed: {:.3}s",
        outcome.nodes_visited,
        outcome.prunes,
        outcome.elapsed.as_secs_f64()
    );
    if outcome.nondeterministic_witness {
        println!("note: witness choice depends on thread scheduling");
    }
    if let Some(w) = &outcome.witness {
        match witness_out {
            Some(path) => {
                if let Err(code) = write_matrix_file(w, path) {
                    return code;
                }
                println!("witness written to {}", path.display());
            }
            None => print!("{}", w.to_text().expect("witness is complete")),
        }
    }
    match outcome.kind {
        OutcomeKind::ExhaustedNone => 0,
        OutcomeKind::WitnessFound => 1,
        OutcomeKind::BudgetExceeded => 3,
    }
}

// ==== certify ====

fn leg_line(name: &str, leg: &LegReport) -> String {
    let status = match leg.status {
        LegStatus::WitnessBySearch => "witness found by search",
        LegStatus::WitnessByConstruction => "witness by construction (search hit budget)",
        LegStatus::ExhaustedNone => "exhausted, no witness",
        LegStatus::BudgetExceeded => "budget exceeded",
    };
    format!(
        "{name} leg: side {}, {status}, {} nodes, {:.3}s",
        leg.side,
        leg.nodes_visited,
        leg.elapsed.as_secs_f64()
    )
}

fn cmd_certify(raw: &[usize], rc: RunConfig) -> i32 {
    let t = match parse_thresholds(raw) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let report = certify_value(&t, &rc.search_config());
    println!("r{} = {}", t, report.value);
    println!("{}", leg_line("lower", &report.lower));
    println!("{}", leg_line("upper", &report.upper));
    if report.certified {
        println!("verdict: CERTIFIED");
        return 0;
    }
    let contradicted = report.lower.status == LegStatus::ExhaustedNone
        || report.upper.status == LegStatus::WitnessBySearch;
    if contradicted {
        println!("verdict: CONTRADICTED (formula and search disagree)");
        1
    } else {
        println!("verdict: INCOMPLETE (budget exhausted before proof)");
        3
    }
}

// ==== sweep ====

#[derive(Serialize)]
struct SweepRow {
    k: usize,
    l: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    value: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    regime: Option<String>,
    lower_bound: usize,
    witness: String,
    side: usize,
    optimal: bool,
    verified: String,
}

#[derive(Serialize)]
struct SweepJson {
    schema: u32,
    arity: usize,
    min: usize,
    max: usize,
    cap: usize,
    rows: Vec<SweepRow>,
}

fn sweep_row(entries: &[usize], cap: usize) -> SweepRow {
    let t = ThresholdVector::new(entries).expect("grid entries are valid");
    let (value, regime) = formula::evaluate(&t);
    let w = best_witness(&t);
    let side = w.matrix.n();
    let verified = if side > cap {
        "skipped".to_string()
    } else if meets_threshold(&w.matrix, &t)
        .expect("arity matches")
        .any_met
    {
        "FAIL".to_string()
    } else {
        "ok".to_string()
    };
    SweepRow {
        k: entries[0],
        l: entries[1],
        m: entries.get(2).copied(),
        value,
        regime: regime.map(|r| r.label().to_string()),
        lower_bound: lower_bound_generic(&t),
        witness: kind_name(w.kind),
        side,
        optimal: w.optimality == Optimality::Optimal,
        verified,
    }
}

fn cmd_sweep(arity: usize, min: usize, max: usize, cap: usize, json: bool) -> i32 {
    if !(2..=3).contains(&arity) {
        eprintln!("error: arity must be 2 or 3");
        return 2;
    }
    if min < 2 || min > max {
        eprintln!("error: need 2 <= min <= max");
        return 2;
    }
    let mut rows = Vec::new();
    for k in min..=max {
        for l in min..=max {
            if arity == 2 {
                rows.push(sweep_row(&[k, l], cap));
            } else {
                for m in min..=max {
                    rows.push(sweep_row(&[k, l, m], cap));
                }
            }
        }
    }
    if json {
        let out = SweepJson {
            schema: SCHEMA_VERSION,
            arity,
            min,
            max,
            cap,
            rows,
        };
        println!("{}", serde_json::to_string(&out).expect("serializable"));
        return 0;
    }
    if arity == 2 {
        println!("k,l,value,lower_bound,witness,side,optimal,verified");
        for r in rows {
            println!(
                "{},{},{},{},{},{},{},{}",
                r.k, r.l, r.value, r.lower_bound, r.witness, r.side, r.optimal, r.verified
            );
        }
    } else {
        println!("k,l,m,value,regime,lower_bound,witness,side,optimal,verified");
        for r in rows {
            println!(
                "{},{},{},{},{},{},{},{},{},{}",
                r.k,
                r.l,
                r.m.expect("three-color row"),
                r.value,
                r.regime.as_deref().expect("three-color row"),
                r.lower_bound,
                r.witness,
                r.side,
                r.optimal,
                r.verified
            );
        }
    }
    0
}
