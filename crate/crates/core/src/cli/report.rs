use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Command;
use crate::error::{Error, Result};
use crate::value::{CorrelatorValue, Provenance};

/// One output column value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Complex(#[serde(with = "crate::complex_serde")] Complex64),
    Real(f64),
    Flag(bool),
    Text(String),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub label: String,
    pub cells: BTreeMap<String, Cell>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    /// Outcome of the check this row reports, if it is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
}

impl ResultRow {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            ..Self::default()
        }
    }

    pub fn cell(mut self, name: &str, cell: Cell) -> Self {
        self.cells.insert(name.to_string(), cell);
        self
    }

    pub fn real(self, name: &str, v: f64) -> Self {
        self.cell(name, Cell::Real(v))
    }

    pub fn complex(self, name: &str, v: Complex64) -> Self {
        self.cell(name, Cell::Complex(v))
    }

    pub fn text(self, name: &str, v: impl Into<String>) -> Self {
        self.cell(name, Cell::Text(v.into()))
    }

    pub fn value(self, v: &CorrelatorValue) -> Self {
        let mut row = self.complex("value", v.value);
        row.provenance = Some(v.provenance.clone());
        row
    }

    pub fn provenance(mut self, p: Provenance) -> Self {
        self.provenance = Some(p);
        self
    }

    pub fn check(mut self, pass: bool) -> Self {
        self.pass = Some(pass);
        self
    }
}

/// Everything needed to interpret and reproduce one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: Command,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_time_s: f64,
    pub passed: bool,
    pub results: Vec<ResultRow>,
}

impl RunManifest {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Numerical(format!("JSON encoding failed: {e}")))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::invalid(format!("not a run manifest: {e}")))
    }

    /// Runs the recorded command again.
    pub fn rerun(&self) -> Result<RunManifest> {
        super::execute(&self.params)
    }

    /// One row per result. Complex cells become `<name>_re,<name>_im`.
    pub fn to_csv(&self) -> Result<String> {
        let mut columns: Vec<(String, bool)> = Vec::new();
        for row in &self.results {
            for (name, cell) in &row.cells {
                if !columns.iter().any(|(c, _)| c == name) {
                    columns.push((name.clone(), matches!(cell, Cell::Complex(_))));
                }
            }
        }
        columns.sort();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["label".to_string()];
        for (name, complex) in &columns {
            if *complex {
                header.push(format!("{name}_re"));
                header.push(format!("{name}_im"));
            } else {
                header.push(name.clone());
            }
        }
        header.push("provenance".into());
        header.push("pass".into());
        w.write_record(&header).map_err(csv_error)?;
        for row in &self.results {
            let mut rec = vec![row.label.clone()];
            for (name, complex) in &columns {
                match (row.cells.get(name), complex) {
                    (Some(Cell::Complex(z)), _) => {
                        rec.push(number(z.re));
                        rec.push(number(z.im));
                    }
                    (Some(Cell::Real(v)), true) => {
                        rec.push(number(*v));
                        rec.push(number(0.0));
                    }
                    (Some(other), false) => rec.push(plain(other)),
                    (Some(other), true) => {
                        rec.push(plain(other));
                        rec.push(String::new());
                    }
                    (None, true) => rec.extend([String::new(), String::new()]),
                    (None, false) => rec.push(String::new()),
                }
            }
            rec.push(row.provenance.as_ref().map(provenance_tag).unwrap_or_default());
            rec.push(row.pass.map(|p| p.to_string()).unwrap_or_default());
            w.write_record(&rec).map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Numerical(format!("CSV encoding failed: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Numerical(e.to_string()))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Numerical(format!("CSV encoding failed: {e}"))
}

fn plain(cell: &Cell) -> String {
    match cell {
        Cell::Real(v) => number(*v),
        Cell::Flag(b) => b.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Complex(z) => format!("{}{:+}i", number(z.re), z.im),
    }
}

/// Shortest round-trip form; exponent notation outside `[1e-4, 1e15)`.
fn number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn provenance_tag(p: &Provenance) -> String {
    match p {
        Provenance::MonteCarlo { .. } => "monte-carlo".into(),
        Provenance::ExactIntegral { formula, method } => format!("exact-integral:{formula}:{method}"),
        Provenance::Oracle => "oracle".into(),
        Provenance::ClosedForm { formula } => format!("closed-form:{formula}"),
    }
}
