//! Result tables, curves and provenance.

use fhs_core::Estimate;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:?}"),
            Cell::Text(t) => t.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(t) => Some(t),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(t: &str) -> Self {
        Cell::Text(t.to_owned())
    }
}

impl From<String> for Cell {
    fn from(t: String) -> Self {
        Cell::Text(t)
    }
}

/// Rows of cells under a fixed header. Estimated quantities occupy two
/// columns, `name` and `name_unc`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

/// Incremental row construction that keeps the header in sync.
pub struct RowBuilder<'a> {
    table: &'a mut Table,
    cells: Vec<(String, Cell)>,
}

impl RowBuilder<'_> {
    pub fn cell(mut self, name: &str, value: impl Into<Cell>) -> Self {
        self.cells.push((name.to_owned(), value.into()));
        self
    }

    pub fn estimate(self, name: &str, e: Estimate) -> Self {
        let unc = format!("{name}_unc");
        self.cell(name, e.value).cell(&unc, e.uncertainty)
    }

    pub fn finish(self) {
        let names: Vec<String> = self.cells.iter().map(|c| c.0.clone()).collect();
        if self.table.columns.is_empty() {
            self.table.columns = names;
        } else {
            assert_eq!(self.table.columns, names, "row layout differs from header of {}", self.table.name);
        }
        self.table.rows.push(self.cells.into_iter().map(|c| c.1).collect());
    }
}

impl Table {
    pub fn new(name: &str) -> Self {
        Self { name: name.to_owned(), columns: Vec::new(), rows: Vec::new() }
    }

    pub fn row(&mut self) -> RowBuilder<'_> {
        RowBuilder { table: self, cells: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Cells of column `name` in row order.
    pub fn values(&self, name: &str) -> Vec<&Cell> {
        match self.column(name) {
            Some(j) => self.rows.iter().map(|r| &r[j]).collect(),
            None => Vec::new(),
        }
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }
}

/// Plot data: one two-column curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Curve {
    pub name: String,
    pub x: String,
    pub y: String,
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([&self.x, &self.y])?;
        for (x, y) in &self.points {
            w.write_record([format!("{x:?}"), format!("{y:?}")])?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    /// SHA-256 of the canonical config JSON.
    pub config_hash: String,
    pub config: serde_json::Value,
    /// Normal-axis node counts of the coarse and fine grids.
    pub resolutions: Vec<[usize; 2]>,
    pub version: &'static str,
    pub uncertainty: &'static str,
}

impl Provenance {
    pub fn new(cfg: &ExperimentConfig, resolutions: Vec<[usize; 2]>) -> Result<Self> {
        let canonical = cfg.canonical_json()?;
        let digest = Sha256::digest(canonical.as_bytes());
        let config_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Ok(Self {
            config_hash,
            config: serde_json::from_str(&canonical)?,
            resolutions,
            version: env!("CARGO_PKG_VERSION"),
            uncertainty: "half the absolute difference between the coarse and fine estimates",
        })
    }
}

/// A named boolean outcome reported alongside the tables.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub experiment: &'static str,
    /// Exploratory results carry no pass/fail meaning.
    pub exploratory: bool,
    pub tables: Vec<Table>,
    pub curves: Vec<Curve>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub provenance: Provenance,
}

impl ExperimentResult {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Two-resolution estimate: the fine value with half the coarse–fine gap.
pub fn two_level(coarse: f64, fine: f64) -> Estimate {
    Estimate { value: fine, uncertainty: 0.5 * (fine - coarse).abs() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_follow_the_header() {
        let mut t = Table::new("demo");
        t.row().cell("name", "a").estimate("q", two_level(1.0, 2.0)).finish();
        t.row().cell("name", "b,c").estimate("q", two_level(0.5, 0.5)).finish();
        assert_eq!(t.columns, ["name", "q", "q_unc"]);
        let csv = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(csv, "name,q,q_unc\na,2.0,0.5\n\"b,c\",0.5,0.0\n");
        assert_eq!(t.values("q_unc")[0].as_f64(), Some(0.5));
    }

    #[test]
    #[should_panic]
    fn mismatched_rows_are_rejected() {
        let mut t = Table::new("demo");
        t.row().cell("a", 1.0).finish();
        t.row().cell("b", 1.0).finish();
    }
}
