//! Column-oriented numeric tables for sweeps, with CSV and JSON round trips.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Rounds to `digits` significant digits and prints the shortest decimal
/// that parses back to the rounded value.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() || x == 0.0 || digits == 0 {
        return format_shortest(x);
    }
    let rounded: f64 = format!("{:.*e}", digits - 1, x)
        .parse()
        .expect("exponent format always parses");
    format_shortest(rounded)
}

/// Shortest round-trip decimal; `-0` prints as `0`.
pub fn format_shortest(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

impl SweepTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        SweepTable {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Comma-separated with a header row. `digits` rounds every value to that
    /// many significant digits; `None` writes shortest round-trip floats.
    pub fn to_csv(&self, digits: Option<usize>) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let cell = match digits {
                    Some(d) => format_significant(*v, d),
                    None => format_shortest(*v),
                };
                let _ = write!(out, "{cell}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::invalid("csv", "missing header row"))?;
        let mut table = SweepTable::new(header.split(',').map(|c| c.trim().to_string()));
        for (i, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|cell| {
                    cell.trim().parse::<f64>().map_err(|e| {
                        Error::invalid("csv", format!("row {}: {cell:?}: {e}", i + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != table.columns.len() {
                return Err(Error::invalid(
                    "csv",
                    format!("row {} has {} cells, header has {}", i + 1, row.len(), table.columns.len()),
                ));
            }
            table.rows.push(row);
        }
        Ok(table)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite tables serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid("json", e.to_string()))
    }
}
