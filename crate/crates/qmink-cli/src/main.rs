//! `qmink`: run invariant suites and emit CSV tables.
//!
//! Exit status: 0 when every check passes, 1 on a failed check or an IO
//! error, 2 on invalid parameters.

use clap::{Args, Parser, Subcommand, ValueEnum};
use qmink::suite::{emit_table, run_suite, Params, Relation, RunReport, SuiteName, TableKind};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qmink", version, about = "Invariant suites and tables for the quantized matrix ball")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite of checks and write a report.
    Run {
        #[arg(value_parser = parse_suite)]
        suite: SuiteName,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Write a CSV table.
    Table {
        #[arg(value_parser = parse_table)]
        kind: TableKind,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Integer λ ≥ 4. Without it each check uses its own default.
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<i64>,
    #[arg(long)]
    max_degree: Option<u32>,
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Work partitions for Monte Carlo integration. Results do not depend on it.
    #[arg(long)]
    shards: Option<usize>,
    /// Multiplies every tolerance.
    #[arg(long)]
    tol_scale: Option<f64>,
    /// Last m of the sigma_a table.
    #[arg(long)]
    m_max: Option<u32>,
    /// Row count of the observables table.
    #[arg(long)]
    rows: Option<usize>,
    /// JSON file with any of the parameters above. Flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn parse_suite(s: &str) -> Result<SuiteName, String> {
    s.parse().map_err(|e: qmink::Error| e.to_string())
}

fn parse_table(s: &str) -> Result<TableKind, String> {
    s.parse().map_err(|e: qmink::Error| e.to_string())
}

enum Failure {
    Invalid(String),
    Io(String),
    Checks,
}

impl CommonArgs {
    fn params(&self) -> Result<Params, Failure> {
        let mut p = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?
            }
            None => Params::default(),
        };
        if self.lambda.is_some() {
            p.lambda = self.lambda;
        }
        if self.max_degree.is_some() {
            p.max_degree = self.max_degree;
        }
        if self.samples.is_some() {
            p.samples = self.samples;
        }
        p.seed = self.seed.unwrap_or(p.seed);
        p.shards = self.shards.unwrap_or(p.shards);
        p.tol_scale = self.tol_scale.unwrap_or(p.tol_scale);
        p.m_max = self.m_max.unwrap_or(p.m_max);
        p.rows = self.rows.unwrap_or(p.rows);
        p.validate().map_err(|e| Failure::Invalid(e.to_string()))?;
        Ok(p)
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("QMINK_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Invalid(format!("QMINK_THREADS must be a positive integer (got '{raw}')")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Invalid(format!("QMINK_THREADS: {e}")))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report_csv(report: &RunReport) -> String {
    let mut out = String::new();
    let p = &report.params;
    let opt = |v: Option<String>| v.unwrap_or_else(|| "default".into());
    // Writing to a String cannot fail.
    let _ = writeln!(
        out,
        "# qmink {} suite={} lambda={} max_degree={} samples={} seed={} shards={} tol_scale={}",
        report.version,
        report.suite.as_str(),
        opt(p.lambda.map(|v| v.to_string())),
        opt(p.max_degree.map(|v| v.to_string())),
        opt(p.samples.map(|v| v.to_string())),
        p.seed,
        p.shards,
        p.tol_scale
    );
    let _ = writeln!(
        out,
        "# timestamp started_unix_seconds={} wall_seconds={}",
        report.timestamp.started_unix_seconds, report.timestamp.wall_seconds
    );
    let _ = writeln!(out, "kind,criterion,name,value,relation,bound,pass");
    for c in &report.checks {
        let rel = match c.relation {
            Relation::Le => "le",
            Relation::Ge => "ge",
        };
        let _ = writeln!(
            out,
            "check,{},{},{:?},{rel},{:?},{}",
            c.criterion,
            csv_field(&c.name),
            c.value,
            c.bound,
            c.pass
        );
    }
    for n in &report.notes {
        let _ = writeln!(out, "note,{},{},{:?},,,", n.criterion, csv_field(&n.name), n.value);
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { suite, common } => {
            let params = common.params()?;
            configure_threads()?;
            let report = run_suite(suite, &params).map_err(|e| match e {
                qmink::Error::InvalidLambda(_) | qmink::Error::InvalidParameter(_) => {
                    Failure::Invalid(e.to_string())
                }
                other => Failure::Io(other.to_string()),
            })?;
            let text = match common.format.unwrap_or(Format::Json) {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&report)
                        .map_err(|e| Failure::Io(format!("serializing report: {e}")))?;
                    s.push('\n');
                    s
                }
                Format::Csv => report_csv(&report),
            };
            write_output(common.out.as_deref(), &text)?;
            let passed = report.checks.iter().filter(|c| c.pass).count();
            eprintln!(
                "suite {}: {} ({passed}/{} checks passed, {:.1} s)",
                suite.as_str(),
                if report.pass { "PASS" } else { "FAIL" },
                report.checks.len(),
                report.timestamp.wall_seconds
            );
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!("  failed: criterion {} {}: {} vs bound {}", c.criterion, c.name, c.value, c.bound);
            }
            if report.pass {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        Command::Table { kind, common } => {
            if common.format == Some(Format::Json) {
                return Err(Failure::Invalid("tables are written as CSV only".into()));
            }
            let params = common.params()?;
            configure_threads()?;
            let text = emit_table(kind, &params).map_err(|e| match e {
                qmink::Error::InvalidLambda(_) | qmink::Error::InvalidParameter(_) => {
                    Failure::Invalid(e.to_string())
                }
                other => Failure::Io(other.to_string()),
            })?;
            write_output(common.out.as_deref(), &text)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
