//! Run reports and their JSON/CSV encodings.
//!
//! Numbers are written in the shortest decimal form that parses back to the
//! same `f64`, in both encodings, so the two can be compared bit for bit.
//! Values that are undefined or non-finite become JSON `null` and an empty CSV
//! cell.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::runner::RunConfig;

/// Column-major header with one row per record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row.into_iter().map(|c| c.filter(|v| v.is_finite())).collect());
    }

    pub fn push_values(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| Some(v)).collect());
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.map(format_number).unwrap_or_default()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|cell| {
                    if cell.is_empty() {
                        Ok(None)
                    } else {
                        cell.parse::<f64>()
                            .map(Some)
                            .map_err(|e| Error::Config(format!("bad CSV number {cell:?}: {e}")))
                    }
                })
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }
}

/// Shortest round-trip decimal, e.g. `0.25`, `1e-300`.
pub fn format_number(v: f64) -> String {
    format!("{v:?}")
}

/// One verification outcome. `passed` is `None` for values reported without
/// a tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub name: String,
    pub value: Option<f64>,
    pub limit: Option<f64>,
    pub passed: Option<bool>,
}

impl OracleResult {
    fn finite(v: f64) -> Option<f64> {
        v.is_finite().then_some(v)
    }

    /// Passes when `value < limit`.
    pub fn below(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.to_string(),
            value: Self::finite(value),
            limit: Some(limit),
            passed: Some(value < limit),
        }
    }

    /// Passes when `value > limit`.
    pub fn above(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.to_string(),
            value: Self::finite(value),
            limit: Some(limit),
            passed: Some(value > limit),
        }
    }

    pub fn info(name: &str, value: f64) -> Self {
        Self {
            name: name.to_string(),
            value: Self::finite(value),
            limit: None,
            passed: None,
        }
    }

    pub fn failed(name: &str) -> Self {
        Self {
            name: name.to_string(),
            value: None,
            limit: None,
            passed: Some(false),
        }
    }

    pub fn summary(&self) -> String {
        let status = match self.passed {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "INFO",
        };
        let value = self.value.map(format_number).unwrap_or_else(|| "-".into());
        match self.limit {
            Some(l) => format!("{status} {} = {value} (limit {})", self.name, format_number(l)),
            None => format!("{status} {} = {value}", self.name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub wall_time_s: f64,
    pub warnings: Vec<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub records: Table,
    pub oracles: Vec<OracleResult>,
    pub meta: Meta,
}

impl RunReport {
    /// True when no oracle with a tolerance failed.
    pub fn passed(&self) -> bool {
        self.oracles.iter().all(|o| o.passed != Some(false))
    }

    pub fn oracle(&self, name: &str) -> Option<&OracleResult> {
        self.oracles.iter().find(|o| o.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let mut t = Table::new(&["a", "b"]);
        t.push_values(&[0.1 + 0.2, 1e-300]);
        t.push(vec![None, Some(-std::f64::consts::PI)]);
        t.push_values(&[f64::NAN, 123456789.0]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = Table::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.rows[2][0], None);
    }

    #[test]
    fn shortest_decimal() {
        assert_eq!(format_number(0.25), "0.25");
        assert_eq!(format_number(1e-300), "1e-300");
        assert_eq!(format_number(0.1 + 0.2), "0.30000000000000004");
    }

    #[test]
    fn oracle_summaries() {
        assert!(OracleResult::below("x", 1e-12, 1e-10).summary().starts_with("PASS x"));
        assert_eq!(OracleResult::above("y", 0.0, 0.1).passed, Some(false));
        assert_eq!(OracleResult::info("z", 1.0).passed, None);
    }
}
