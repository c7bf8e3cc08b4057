//! Row types of the emitted data files, with writers and readers for both
//! CSV and JSON Lines.
//!
//! CSV floats are written with 17 significant digits so that every value
//! round-trips exactly; missing values are empty fields (`null` in JSON).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }

    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => Format::Jsonl,
            _ => Format::Csv,
        }
    }
}

/// One field of an output row.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
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

/// `{:.16e}`: 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => (*v).into(),
            Cell::Float(v) => serde_json::Number::from_f64(*v)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Text(s) => s.clone().into(),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

/// Named table with a fixed column list.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width of table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column; blanks and text read as `NaN`.
    pub fn floats(&self, name: &str) -> Vec<f64> {
        let Some(k) = self.column(name) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .map(|row| match &row[k] {
                Cell::Int(v) => *v as f64,
                Cell::Float(v) => *v,
                _ => f64::NAN,
            })
            .collect()
    }

    pub fn texts(&self, name: &str) -> Vec<String> {
        let Some(k) = self.column(name) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .map(|row| match &row[k] {
                Cell::Text(s) => s.clone(),
                Cell::Int(v) => v.to_string(),
                Cell::Float(v) => format_float(*v),
                Cell::Empty => String::new(),
            })
            .collect()
    }

    pub fn append(&mut self, other: Table) {
        assert_eq!(self.columns, other.columns);
        self.rows.extend(other.rows);
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<()> {
        let io = |e: std::io::Error| Error::Checkpoint(format!("{}: {e}", path.display()));
        let file = File::create(path).map_err(io)?;
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(file);
                let csv_err = |e: csv::Error| Error::Checkpoint(format!("{}: {e}", path.display()));
                w.write_record(&self.columns).map_err(csv_err)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv)).map_err(csv_err)?;
                }
                w.flush().map_err(io)?;
            }
            Format::Jsonl => {
                let mut w = BufWriter::new(file);
                for row in &self.rows {
                    let obj: serde_json::Map<String, serde_json::Value> = self
                        .columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::json))
                        .collect();
                    writeln!(w, "{}", serde_json::Value::Object(obj)).map_err(io)?;
                }
                w.flush().map_err(io)?;
            }
        }
        Ok(())
    }
}

pub const STATICS_COLUMNS: [&str; 14] = [
    "L", "lambda", "r", "n", "F_mean", "F_sem", "f1_mean", "f1_sem", "f2_mean", "f2_sem", "xi_mean",
    "xi_sem", "gap_mean", "gap_sem",
];
pub const ENTROPY_COLUMNS: [&str; 6] = ["L", "lambda", "r", "l", "S_mean", "S_sem"];
pub const DYNAMICS_COLUMNS: [&str; 9] = ["L", "lambda0", "dlambda", "kind", "r", "T", "t", "F_mean", "F_sem"];
pub const CORRELATION_COLUMNS: [&str; 6] = ["L", "lambda", "r", "d", "C_mean", "C_sem"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaticsRecord {
    #[serde(rename = "L")]
    pub length: usize,
    pub lambda: f64,
    pub r: f64,
    pub n: u64,
    #[serde(rename = "F_mean")]
    pub f_mean: Option<f64>,
    #[serde(rename = "F_sem")]
    pub f_sem: Option<f64>,
    pub f1_mean: Option<f64>,
    pub f1_sem: Option<f64>,
    pub f2_mean: Option<f64>,
    pub f2_sem: Option<f64>,
    pub xi_mean: Option<f64>,
    pub xi_sem: Option<f64>,
    pub gap_mean: Option<f64>,
    pub gap_sem: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyRecord {
    #[serde(rename = "L")]
    pub length: usize,
    pub lambda: f64,
    pub r: f64,
    pub l: usize,
    #[serde(rename = "S_mean")]
    pub s_mean: f64,
    #[serde(rename = "S_sem")]
    pub s_sem: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicsRecord {
    #[serde(rename = "L")]
    pub length: usize,
    pub lambda0: f64,
    pub dlambda: f64,
    pub kind: String,
    pub r: f64,
    #[serde(rename = "T")]
    pub temperature: Option<f64>,
    pub t: f64,
    #[serde(rename = "F_mean")]
    pub f_mean: f64,
    #[serde(rename = "F_sem")]
    pub f_sem: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRecord {
    #[serde(rename = "L")]
    pub length: usize,
    pub lambda: f64,
    pub r: f64,
    pub d: usize,
    #[serde(rename = "C_mean")]
    pub c_mean: f64,
    #[serde(rename = "C_sem")]
    pub c_sem: f64,
}

/// Reads rows of any record type from a `.csv` or `.jsonl` file.
pub fn read_records<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let err = |e: String| Error::Checkpoint(format!("{}: {e}", path.display()));
    let file = File::open(path).map_err(|e| err(e.to_string()))?;
    match Format::from_path(path) {
        Format::Csv => csv::Reader::from_reader(file)
            .deserialize()
            .map(|row| row.map_err(|e| err(e.to_string())))
            .collect(),
        Format::Jsonl => BufReader::new(file)
            .lines()
            .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()))
            .map(|line| {
                let line = line.map_err(|e| err(e.to_string()))?;
                serde_json::from_str(&line).map_err(|e| err(e.to_string()))
            })
            .collect(),
    }
}

pub fn read_statics(path: &Path) -> Result<Vec<StaticsRecord>> {
    read_records(path)
}

pub fn read_entropy(path: &Path) -> Result<Vec<EntropyRecord>> {
    read_records(path)
}

pub fn read_dynamics(path: &Path) -> Result<Vec<DynamicsRecord>> {
    read_records(path)
}

pub fn read_correlations(path: &Path) -> Result<Vec<CorrelationRecord>> {
    read_records(path)
}
