//! Named invariant checks and CSV tables, shared by the `qmink` binary and the
//! acceptance tests.
//!
//! Every numbered criterion has its own default parameters (λ values, degree
//! cutoffs, sample counts). Fields set in [`Params`] override them.

mod criteria;
mod tables;

pub use criteria::{criterion, CRITERIA};
pub use tables::{emit_table, TableKind};

use crate::coherent_states::QuantizationParam;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

/// Largest accepted `max_degree` override.
pub const MAX_DEGREE_CAP: u32 = 32;

/// Run parameters. `None` keeps each criterion's own default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub lambda: Option<i64>,
    pub max_degree: Option<u32>,
    pub samples: Option<u64>,
    pub seed: u64,
    pub shards: usize,
    /// Multiplies every tolerance (and every σ band).
    pub tol_scale: f64,
    /// Last `m` of the `sigma_a` table.
    pub m_max: u32,
    /// Row count of the `observables` table.
    pub rows: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            lambda: None,
            max_degree: None,
            samples: None,
            seed: 42,
            shards: 8,
            tol_scale: 1.0,
            m_max: 10,
            rows: 10,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        if let Some(l) = self.lambda {
            QuantizationParam::new(l)?;
        }
        if let Some(d) = self.max_degree {
            if d > MAX_DEGREE_CAP {
                return Err(Error::InvalidParameter(format!(
                    "max_degree {d} exceeds the cap {MAX_DEGREE_CAP}"
                )));
            }
        }
        if self.samples == Some(0) {
            return Err(Error::InvalidParameter("samples must be positive".into()));
        }
        if self.shards == 0 {
            return Err(Error::InvalidParameter("shards must be positive".into()));
        }
        if !(self.tol_scale.is_finite() && self.tol_scale > 0.0) {
            return Err(Error::InvalidParameter("tol_scale must be positive".into()));
        }
        if self.rows == 0 {
            return Err(Error::InvalidParameter("rows must be positive".into()));
        }
        Ok(())
    }

    /// The λ override, or each value of `defaults`.
    pub(crate) fn lambdas(&self, defaults: &[u32]) -> Vec<QuantizationParam> {
        let raw: Vec<i64> = match self.lambda {
            Some(l) => vec![l],
            None => defaults.iter().map(|&l| l as i64).collect(),
        };
        raw.into_iter()
            .map(|l| QuantizationParam::new(l).expect("validated lambda"))
            .collect()
    }

    pub(crate) fn lambda_or(&self, default: u32) -> QuantizationParam {
        self.lambdas(&[default])[0]
    }

    pub(crate) fn degree_or(&self, default: u32) -> u32 {
        self.max_degree.unwrap_or(default)
    }

    pub(crate) fn samples_or(&self, default: u64) -> u64 {
        self.samples.unwrap_or(default)
    }
}

/// Which group of criteria to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Classical,
    Kernel,
    Ladder,
    Rep,
    Measure,
    Star,
    All,
}

impl SuiteName {
    pub const ALL: [SuiteName; 7] = [
        SuiteName::Classical,
        SuiteName::Kernel,
        SuiteName::Ladder,
        SuiteName::Rep,
        SuiteName::Measure,
        SuiteName::Star,
        SuiteName::All,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Classical => "classical",
            SuiteName::Kernel => "kernel",
            SuiteName::Ladder => "ladder",
            SuiteName::Rep => "rep",
            SuiteName::Measure => "measure",
            SuiteName::Star => "star",
            SuiteName::All => "all",
        }
    }

    /// Criterion numbers run by this suite.
    pub fn criteria(self) -> &'static [u8] {
        match self {
            SuiteName::Classical => &[8, 9],
            SuiteName::Kernel => &[1],
            SuiteName::Ladder => &[2, 3, 4, 5],
            SuiteName::Rep => &[7],
            SuiteName::Measure => &[6, 11],
            SuiteName::Star => &[10],
            SuiteName::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
        }
    }
}

impl std::str::FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite '{s}'")))
    }
}

/// How a check's value is compared with its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `value <= bound`.
    Le,
    /// `value >= bound`.
    Ge,
}

/// One pass/fail record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(criterion: u8, name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            value,
            relation: Relation::Le,
            bound,
            pass: value <= bound,
        }
    }

    pub fn at_least(criterion: u8, name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            value,
            relation: Relation::Ge,
            bound,
            pass: value >= bound,
        }
    }

    /// A boolean property, recorded as value 1 (holds) or 0 against bound 1.
    pub fn holds(criterion: u8, name: impl Into<String>, ok: bool) -> Self {
        Self::at_least(criterion, name, if ok { 1.0 } else { 0.0 }, 1.0)
    }

    /// A failed check for a computation that returned an error.
    pub fn errored(criterion: u8, name: impl Into<String>, err: &Error) -> Self {
        let mut c = Self::holds(criterion, format!("{} ({err})", name.into()), false);
        c.value = f64::NAN;
        c
    }
}

/// An informational value reported alongside the checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Note {
    pub criterion: u8,
    pub name: String,
    pub value: f64,
}

/// Outcome of one criterion.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CriterionReport {
    pub checks: Vec<Check>,
    pub notes: Vec<Note>,
}

impl CriterionReport {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub(crate) fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub(crate) fn note(&mut self, criterion: u8, name: impl Into<String>, value: f64) {
        self.notes.push(Note {
            criterion,
            name: name.into(),
            value,
        });
    }
}

/// Volatile fields, kept apart so reports are otherwise reproducible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timestamp {
    pub started_unix_seconds: u64,
    pub wall_seconds: f64,
}

/// Result of [`run_suite`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub suite: SuiteName,
    pub version: &'static str,
    pub params: Params,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub notes: Vec<Note>,
    pub timestamp: Timestamp,
}

/// Runs every criterion of the suite.
pub fn run_suite(name: SuiteName, params: &Params) -> Result<RunReport> {
    params.validate()?;
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let clock = Instant::now();
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    for &n in name.criteria() {
        let report = criterion(n, params)?;
        checks.extend(report.checks);
        notes.extend(report.notes);
    }
    Ok(RunReport {
        suite: name,
        version: env!("CARGO_PKG_VERSION"),
        params: params.clone(),
        pass: !checks.is_empty() && checks.iter().all(|c| c.pass),
        checks,
        notes,
        timestamp: Timestamp {
            started_unix_seconds: started,
            wall_seconds: clock.elapsed().as_secs_f64(),
        },
    })
}
