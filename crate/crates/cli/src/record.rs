//! The output record shared by every subcommand, and its JSON, CSV and
//! table encodings.
//!
//! Exact quantities (integers, rationals) are always strings so that no
//! consumer can silently round them; reals are JSON numbers written as the
//! shortest decimal that round-trips.

use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Bool(bool),
    Real(f64),
    Text(String),
    Null,
}

impl Cell {
    pub fn exact(v: impl ToString) -> Cell {
        Cell::Text(v.to_string())
    }

    pub fn text(v: impl Into<String>) -> Cell {
        Cell::Text(v.into())
    }

    /// Non-finite values have no JSON number form and are kept as text.
    pub fn real(x: f64) -> Cell {
        if x.is_finite() {
            Cell::Real(x)
        } else {
            Cell::Text(x.to_string())
        }
    }

    /// The scalar as it appears in CSV and table output. Reals use the same
    /// digits as the JSON encoding.
    pub fn render(&self) -> String {
        match self {
            Cell::Bool(b) => b.to_string(),
            Cell::Real(x) => serde_json::to_string(x).unwrap_or_else(|_| x.to_string()),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

pub type Row = IndexMap<String, Cell>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub schema_version: u32,
    pub command: String,
    pub params: Row,
    pub rows: Vec<Row>,
    pub flags: Vec<String>,
    pub wall_time_ms: f64,
}

impl OutputRecord {
    pub fn new(command: impl Into<String>) -> Self {
        OutputRecord {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            params: Row::new(),
            rows: Vec::new(),
            flags: Vec::new(),
            wall_time_ms: 0.0,
        }
    }

    pub fn param(&mut self, key: &str, value: Cell) -> &mut Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records contain only finite reals")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Column order: first appearance across rows.
    pub fn columns(&self) -> Vec<&str> {
        let mut cols: Vec<&str> = Vec::new();
        for row in &self.rows {
            for k in row.keys() {
                if !cols.contains(&k.as_str()) {
                    cols.push(k);
                }
            }
        }
        cols
    }

    /// One CSV line per row under a header of [`Self::columns`]; missing
    /// cells are empty.
    pub fn to_csv(&self) -> String {
        let cols = self.columns();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&cols).expect("in-memory write");
        for row in &self.rows {
            let cells: Vec<String> = cols
                .iter()
                .map(|c| row.get(*c).map(Cell::render).unwrap_or_default())
                .collect();
            w.write_record(&cells).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 cells")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.command);
        for (k, v) in &self.params {
            let _ = writeln!(out, "#   {k} = {}", v.render());
        }
        for flag in &self.flags {
            let _ = writeln!(out, "!! {flag}");
        }
        let cols = self.columns();
        if self.rows.len() == 1 {
            let width = cols.iter().map(|c| c.len()).max().unwrap_or(0);
            for c in &cols {
                let v = self.rows[0].get(*c).map(Cell::render).unwrap_or_default();
                let _ = writeln!(out, "{c:<width$}  {v}");
            }
        } else if !self.rows.is_empty() {
            let rendered: Vec<Vec<String>> = self
                .rows
                .iter()
                .map(|r| {
                    cols.iter()
                        .map(|c| r.get(*c).map(Cell::render).unwrap_or_default())
                        .collect()
                })
                .collect();
            let widths: Vec<usize> = cols
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    rendered
                        .iter()
                        .map(|r| r[i].len())
                        .chain([c.len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: Vec<&str>| {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(s, w)| format!("{s:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            let _ = writeln!(out, "{}", line(cols.clone()));
            for r in &rendered {
                let _ = writeln!(out, "{}", line(r.iter().map(String::as_str).collect()));
            }
        }
        out
    }
}
