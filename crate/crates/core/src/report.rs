//! Check records shared by every verification routine.

use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;

/// How `estimate` is meant to relate to `bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// estimate ≥ bound − tolerance
    AtLeast,
    /// estimate ≤ bound + tolerance
    AtMost,
    /// |estimate − bound| ≤ tolerance
    Equal,
}

impl Relation {
    pub fn holds(self, estimate: f64, bound: f64, tolerance: f64) -> bool {
        match self {
            Relation::AtLeast => estimate >= bound - tolerance,
            Relation::AtMost => estimate <= bound + tolerance,
            Relation::Equal => (estimate - bound).abs() <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Not enough usable samples to decide.
    Inconclusive,
    /// The check itself raised an error.
    Error,
}

/// A named sample that witnessed the reported value (a minimiser, a violation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    pub values: Vec<f64>,
}

/// Tabular plot-ready data attached to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    /// Plot kind this table feeds, e.g. `ratio-vs-parameter`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub columns: Vec<String>,
    #[serde(deserialize_with = "nullable_rows")]
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Series {
            name: name.into(),
            kind: None,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_kind(mut self, kind: &str) -> Self {
        self.kind = Some(kind.to_string());
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Outcome of one verified identity or inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub parameters: Value,
    #[serde(deserialize_with = "nullable_f64")]
    pub estimate: f64,
    #[serde(default)]
    pub bound: Option<f64>,
    pub relation: Relation,
    pub tolerance: f64,
    pub pass: bool,
    pub status: Status,
    #[serde(default)]
    pub witnesses: Vec<Witness>,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default)]
    pub series: Vec<Series>,
    /// Wall-clock time; left out of reports meant to be reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl CheckReport {
    /// Builds a report whose pass flag is derived from `relation`.
    pub fn judged(
        check_id: impl Into<String>,
        parameters: Value,
        estimate: f64,
        bound: f64,
        relation: Relation,
        tolerance: f64,
    ) -> Self {
        let pass = estimate.is_finite() && relation.holds(estimate, bound, tolerance);
        CheckReport {
            check_id: check_id.into(),
            parameters,
            estimate,
            bound: Some(bound),
            relation,
            tolerance,
            pass,
            status: if pass { Status::Pass } else { Status::Fail },
            witnesses: Vec::new(),
            notes: Vec::new(),
            series: Vec::new(),
            timing_ms: None,
        }
    }

    /// A report with no numeric bound (exploratory probes).
    pub fn unbounded(check_id: impl Into<String>, parameters: Value, estimate: f64, pass: bool) -> Self {
        CheckReport {
            check_id: check_id.into(),
            parameters,
            estimate,
            bound: None,
            relation: Relation::Equal,
            tolerance: 0.0,
            pass,
            status: if pass { Status::Pass } else { Status::Fail },
            witnesses: Vec::new(),
            notes: Vec::new(),
            series: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn errored(check_id: impl Into<String>, parameters: Value, message: impl Into<String>) -> Self {
        let mut r = Self::unbounded(check_id, parameters, f64::NAN, false);
        r.status = Status::Error;
        r.notes.push(message.into());
        r
    }

    pub fn inconclusive(mut self, note: impl Into<String>) -> Self {
        self.pass = false;
        self.status = Status::Inconclusive;
        self.notes.push(note.into());
        self
    }

    pub fn with_witness(mut self, label: impl Into<String>, values: Vec<f64>) -> Self {
        self.witnesses.push(Witness { label: label.into(), values });
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn with_series(mut self, series: Series) -> Self {
        self.series.push(series);
        self
    }

    /// Forces failure (e.g. a sub-condition failed) while keeping the estimate.
    pub fn fail_with(mut self, note: impl Into<String>) -> Self {
        self.pass = false;
        if self.status == Status::Pass {
            self.status = Status::Fail;
        }
        self.notes.push(note.into());
        self
    }

    /// `pass ⇒ estimate respects bound within tolerance`.
    pub fn is_consistent(&self) -> bool {
        match (self.pass, self.bound) {
            (true, Some(b)) => self.relation.holds(self.estimate, b, self.tolerance),
            _ => true,
        }
    }
}

fn nullable_f64<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

fn nullable_rows<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<f64>>, D::Error> {
    let rows = Vec::<Vec<Option<f64>>>::deserialize(d)?;
    Ok(rows
        .into_iter()
        .map(|r| r.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect())
        .collect())
}
