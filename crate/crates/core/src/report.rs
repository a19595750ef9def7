//! Structured pass/fail records produced by every verification routine.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Deviation sits on truncation-boundary rows and was requested anyway.
    BoundaryExpected,
    Skipped,
}

/// How `measured` is compared with `tolerance`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl CheckRecord {
    /// Passes iff `measured <= tolerance` (NaN fails).
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        let status = if measured <= tolerance {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        CheckRecord {
            name: name.into(),
            measured,
            tolerance,
            comparison: Comparison::AtMost,
            status,
            note: None,
        }
    }

    /// Passes iff `measured >= threshold`.
    pub fn at_least(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        let status = if measured >= threshold {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        CheckRecord {
            name: name.into(),
            measured,
            tolerance: threshold,
            comparison: Comparison::AtLeast,
            status,
            note: None,
        }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Self {
        CheckRecord {
            name: name.into(),
            measured: 0.0,
            tolerance: 0.0,
            comparison: Comparison::AtMost,
            status: CheckStatus::Skipped,
            note: Some(reason.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Plot-ready table attached to a report (convergence sequences, sweeps).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(cell_text).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Num(v) => format_num(*v),
        Cell::Text(s) if s.contains(',') || s.contains('"') => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

fn format_num(v: f64) -> String {
    // shortest roundtrip representation
    format!("{v:?}")
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub environment: BTreeMap<String, serde_json::Value>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub tables: BTreeMap<String, Table>,
}

impl CheckReport {
    pub fn new(suite: impl Into<String>) -> Self {
        CheckReport {
            suite: suite.into(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.checks.push(record);
    }

    pub fn env(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.environment.insert(key.to_string(), v);
    }

    pub fn table(&mut self, key: &str, table: Table) {
        self.tables.insert(key.to_string(), table);
    }

    /// Appends another report's records, prefixing names with its suite.
    pub fn absorb(&mut self, other: CheckReport) {
        let prefix = other.suite;
        for mut r in other.checks {
            if !prefix.is_empty() {
                r.name = format!("{prefix}/{}", r.name);
            }
            self.checks.push(r);
        }
        for (k, v) in other.environment {
            self.environment.entry(k).or_insert(v);
        }
        for (k, t) in other.tables {
            self.tables.insert(k, t);
        }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(CheckRecord::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|r| !r.passed())
    }

    /// Largest measured value among records whose name starts with `prefix`.
    pub fn worst(&self, prefix: &str) -> Option<f64> {
        self.checks
            .iter()
            .filter(|r| r.name.starts_with(prefix) && r.status != CheckStatus::Skipped)
            .map(|r| r.measured)
            .reduce(f64::max)
    }

    pub fn find(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|r| r.name == name)
    }

    /// Flattened per-check rows.
    pub fn checks_csv(&self) -> String {
        let mut t = Table::new(&["suite", "check", "measured", "tolerance", "comparison", "status"]);
        for r in &self.checks {
            let cmp = match r.comparison {
                Comparison::AtMost => "at_most",
                Comparison::AtLeast => "at_least",
            };
            let status = serde_json::to_value(r.status)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            t.push(vec![
                Cell::Text(self.suite.clone()),
                Cell::Text(r.name.clone()),
                Cell::Num(r.measured),
                Cell::Num(r.tolerance),
                cmp.into(),
                Cell::Text(status),
            ]);
        }
        t.to_csv()
    }

    /// One line per record, for terminals.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for r in &self.checks {
            let tag = match r.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
                CheckStatus::BoundaryExpected => "BOUNDARY",
                CheckStatus::Skipped => "SKIPPED",
            };
            let op = match r.comparison {
                Comparison::AtMost => "<=",
                Comparison::AtLeast => ">=",
            };
            let _ = write!(s, "[{tag:>8}] {} : {:.3e} {op} {:.3e}", r.name, r.measured, r.tolerance);
            if let Some(n) = &r.note {
                let _ = write!(s, "  ({n})");
            }
            s.push('\n');
        }
        s
    }
}
