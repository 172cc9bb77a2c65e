//! Tabular reports rendered as CSV or JSON.
//!
//! Floats are written with 17 significant digits in CSV and in shortest
//! round-trip form in JSON; non-finite floats become `inf`, `-inf`, `nan`.

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

fn nonfinite(v: f64) -> &'static str {
    if v.is_nan() {
        "nan"
    } else if v > 0.0 {
        "inf"
    } else {
        "-inf"
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Float(v) => nonfinite(*v).to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Int(v) => s.serialize_i64(*v),
            Cell::Float(v) if v.is_finite() => s.serialize_f64(*v),
            Cell::Float(v) => s.serialize_str(nonfinite(*v)),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Bool(b) => s.serialize_bool(*b),
            Cell::Empty => s.serialize_none(),
        }
    }
}

/// One result line. Every row names its experiment and carries the
/// parameters, grid size and tolerance needed to recompute it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub experiment: String,
    pub cells: Vec<Cell>,
}

struct RowView<'a> {
    columns: &'a [String],
    row: &'a ReportRow,
}

impl Serialize for RowView<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.columns.len() + 1))?;
        map.serialize_entry("experiment", &self.row.experiment)?;
        for (c, v) in self.columns.iter().zip(&self.row.cells) {
            map.serialize_entry(c, v)?;
        }
        map.end()
    }
}

/// A failed assertion, kept for the exit status and the diagnostic stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub what: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: String,
    pub columns: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn new(experiment: &str, columns: &[&str]) -> Self {
        Report {
            experiment: experiment.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            failures: Vec::new(),
        }
    }

    /// Appends a row; panics if the width disagrees with the header, which
    /// is a programming error.
    pub fn push(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len(), self.columns.len(), "row width for {}", self.experiment);
        self.rows.push(ReportRow {
            experiment: self.experiment.clone(),
            cells,
        });
    }

    /// Records the outcome of a check and returns the status cell text.
    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) -> &'static str {
        if ok {
            "pass"
        } else {
            self.failures.push(Failure { what: what() });
            "fail"
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.cells.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let views: Vec<RowView<'_>> = self
            .rows
            .iter()
            .map(|row| RowView {
                columns: &self.columns,
                row,
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&views).expect("report rows serialize");
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo", &["name", "value", "n", "ok"]);
        r.push(vec!["a,b".into(), 0.1.into(), 3usize.into(), true.into()]);
        r.push(vec!["c".into(), f64::INFINITY.into(), 4usize.into(), Cell::Empty]);
        r
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        assert_eq!(
            csv,
            "name,value,n,ok\n\"a,b\",1.0000000000000001e-1,3,true\nc,inf,4,\n"
        );
    }

    #[test]
    fn csv_floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2f64.powi(-40), 123456.789e200, -5e-310] {
            let s = Cell::Float(v).csv();
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_rows_carry_experiment() {
        let parsed: serde_json::Value = serde_json::from_str(&sample().to_json()).unwrap();
        let rows = parsed.as_array().unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0]["experiment"], "demo");
        assert_eq!(rows[0]["name"], "a,b");
        assert_eq!(rows[0]["value"], 0.1);
        assert_eq!(rows[1]["value"], "inf");
        assert!(rows[1]["ok"].is_null());
    }

    #[test]
    fn check_collects_failures() {
        let mut r = sample();
        assert_eq!(r.check(true, || unreachable!()), "pass");
        assert_eq!(r.check(false, || "x".into()), "fail");
        assert!(!r.passed());
    }
}
