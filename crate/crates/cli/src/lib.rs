//! Command-line harness for daemonic work-extraction experiments.
//!
//! Ensembles (`fig2`, `werner-sweep`) default to CSV and single-state
//! reports (`query`, `table1`, `theorem-check`) default to JSON. Every run is
//! a pure function of its command line.

pub mod commands;
pub mod format;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use daemonic_core::quantum::Hamiltonian;
use daemonic_core::utility::UtilityFunction;
use daemonic_core::zoo::StateSpec;
use thiserror::Error;

use commands::{empirical_threshold, summarize_fig2, unit_gap};
use format::{num, report_csv, report_json, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] daemonic_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse(_) => 2,
            _ => 1,
        }
    }
}

fn parse_error(e: daemonic_core::Error) -> CliError {
    CliError::Parse(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "daemonic", version, about = "Daemonic work-extraction experiments")]
pub struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Operator-ordering parameter of the work quasiprobability.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub q: f64,
    /// Zero-gain and classification tolerance.
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub tol: f64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Sample count, grid size or draw count, depending on the command.
    #[arg(long, global = true)]
    pub n: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report gains and correlations of one state.
    Query {
        /// `werner:z=`, `xstate:p=,C=`, `example:r=,c=,e1=,e2=` or `zerogain:r=,q=,seed=`.
        #[arg(long)]
        state: String,
        /// `diag:e1,e2,...`; defaults to the family's own energies or `diag:0,1`.
        #[arg(long)]
        hamiltonian: Option<String>,
        /// `linear`, `exp:r=`, `cubic:X=,Y=,Z=` or `poly:c1,c2,c3`.
        #[arg(long, default_value = "linear")]
        utility: String,
    },
    /// Gain versus concurrence for random X-states under random cubic utilities.
    Fig2,
    /// Verdicts for the three rows of the correlation table.
    Table1,
    /// Werner-state gain, closed form against optimizer, on an even z grid (q fixed at 1/2).
    WernerSweep {
        #[arg(long, default_value_t = 0.6)]
        x: f64,
        #[arg(long, default_value_t = 0.8)]
        y: f64,
    },
    /// Zero-gain construction and gain invariants over random draws.
    TheoremCheck,
}

/// Text produced by a command plus its validation verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub body: String,
    /// Human-readable summary for standard error.
    pub summary: Vec<String>,
    pub valid: bool,
}

pub const DEFAULT_FIG2_SAMPLES: u64 = 10_000;
pub const DEFAULT_WERNER_GRID: u64 = 101;
pub const DEFAULT_CHECK_DRAWS: u64 = 100;

/// Largest tolerated gap between the Werner closed form and the optimizer.
pub const WERNER_AGREEMENT: f64 = 1e-5;

pub fn parse_hamiltonian(spec: &str) -> Result<Hamiltonian, CliError> {
    let body = spec
        .strip_prefix("diag:")
        .ok_or_else(|| CliError::Parse(format!("'{spec}': expected diag:e1,e2,...")))?;
    let energies = body
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Parse(format!("'{t}': {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Hamiltonian::diagonal(&energies).map_err(parse_error)
}

fn check_q(q: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(CliError::Parse(format!("--q {q} is outside [0, 1]")))
    }
}

pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    check_q(cli.q)?;
    match &cli.command {
        Command::Query {
            state,
            hamiltonian,
            utility,
        } => {
            let spec: StateSpec = state.parse().map_err(parse_error)?;
            let u: UtilityFunction = utility.parse().map_err(parse_error)?;
            let h = match hamiltonian {
                Some(s) => parse_hamiltonian(s)?,
                None => spec.natural_hamiltonian().unwrap_or_else(unit_gap),
            };
            let report = commands::query(&spec, &h, &u, cli.q, cli.seed, cli.tol)?;
            let valid = report.utility_gain >= -1e-9 && report.ergotropy_gain >= -1e-9;
            Ok(Output {
                body: render_report(&report, cli.format),
                summary: Vec::new(),
                valid,
            })
        }
        Command::Fig2 => {
            let n = cli.n.unwrap_or(DEFAULT_FIG2_SAMPLES);
            let rows = commands::fig2(n, cli.seed, cli.q)?;
            let mut table = Table::new(&["index", "p", "C", "X", "Y", "Z", "gain"]);
            for r in &rows {
                table.push(vec![r.index.to_string(), num(r.p), num(r.c), num(r.x), num(r.y), num(r.z), num(r.gain)]);
            }
            let s = summarize_fig2(&rows);
            let summary = vec![
                format!("samples: {}", s.samples),
                format!("concurrence > 0.5 with gain < 1e-3: {}", s.entangled_zero_gain),
                format!(
                    "|Z| < 0.01 with X <= 0 <= Y: {} ({} with gain >= 1e-4)",
                    s.small_z, s.small_z_violations
                ),
                format!("minimum gain: {}", num(s.min_gain)),
            ];
            let valid = n == 0 || (s.entangled_zero_gain > 0 && s.min_gain >= -1e-9);
            Ok(Output {
                body: render_table(&table, cli.format, Format::Csv),
                summary,
                valid,
            })
        }
        Command::Table1 => {
            let report = commands::table1(cli.seed, cli.q, cli.tol)?;
            let summary = report
                .rows
                .iter()
                .map(|r| format!("row {}: {} ({})", r.row, if r.passed { "PASS" } else { "FAIL" }, r.claim))
                .collect();
            Ok(Output {
                body: render_report(&report, cli.format),
                summary,
                valid: report.rows.iter().all(|r| r.passed),
            })
        }
        Command::WernerSweep { x, y } => {
            let grid = cli.n.unwrap_or(DEFAULT_WERNER_GRID) as usize;
            let rows = commands::werner_sweep(*x, *y, grid, cli.seed)?;
            let mut table = Table::new(&["z", "gain_closed_form", "gain_numeric"]);
            for r in &rows {
                table.push(vec![num(r.z), num(r.closed_form), num(r.numeric)]);
            }
            let z0 = daemonic_core::zoo::werner_threshold(*x, *y)?;
            let worst = rows.iter().map(|r| (r.closed_form - r.numeric).abs()).fold(0.0, f64::max);
            let found = empirical_threshold(&rows, cli.tol);
            let step = if grid > 1 { 1.0 / (grid - 1) as f64 } else { 1.0 };
            let threshold_ok = match found {
                Some(z) => (z - z0).abs() <= step + 1e-12,
                None => z0 >= 1.0 - step,
            };
            let summary = vec![
                format!("predicted threshold: {}", num(z0)),
                format!("empirical threshold: {}", found.map_or("none".into(), num)),
                format!("max |closed form - numeric|: {}", num(worst)),
            ];
            let nonnegative = rows.iter().all(|r| r.numeric >= -1e-9);
            Ok(Output {
                body: render_table(&table, cli.format, Format::Csv),
                summary,
                valid: worst <= WERNER_AGREEMENT && threshold_ok && nonnegative,
            })
        }
        Command::TheoremCheck => {
            let n = cli.n.unwrap_or(DEFAULT_CHECK_DRAWS);
            let report = commands::theorem_check(n, cli.seed, cli.tol)?;
            let summary = report
                .checks
                .iter()
                .map(|c| format!("{}: {} passed, {} failed, worst {}", c.name, c.passed, c.failed, num(c.worst)))
                .collect();
            Ok(Output {
                body: render_report(&report, cli.format),
                summary,
                valid: report.passed,
            })
        }
    }
}

fn render_table(table: &Table, format: Option<Format>, default: Format) -> String {
    match format.unwrap_or(default) {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    }
}

fn render_report<T: serde::Serialize>(report: &T, format: Option<Format>) -> String {
    match format.unwrap_or(Format::Json) {
        Format::Csv => report_csv(report),
        Format::Json => report_json(report),
    }
}

/// Runs the parsed command, writes its output and returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli).and_then(|out| {
        match &cli.out {
            Some(path) => fs::write(path, &out.body)?,
            None => io::stdout().write_all(out.body.as_bytes())?,
        }
        Ok(out)
    }) {
        Ok(out) => {
            for line in &out.summary {
                eprintln!("{line}");
            }
            if out.valid {
                0
            } else {
                eprintln!("validation failed");
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
