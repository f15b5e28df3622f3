//! Tabular results rendered as CSV (9 significant digits) or JSON (full
//! precision). Both carry the same fields in the same order.

use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
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

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) if v.is_finite() => format!("{v:.8e}"),
            Cell::Num(v) if v.is_nan() => "nan".into(),
            Cell::Num(v) => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    /// Non-finite numbers have no JSON form and become `null`.
    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

/// Scalar metadata plus a table of rows.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub meta: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(columns: &[&str]) -> Self {
        Self { meta: Vec::new(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn meta(mut self, key: &str, value: impl Into<Cell>) -> Self {
        self.meta.push((key.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, format: Format, mut out: W) -> CliResult<()> {
        match format {
            Format::Csv => {
                for (k, v) in &self.meta {
                    writeln!(out, "# {k}={}", v.csv())?;
                }
                if !self.columns.is_empty() {
                    writeln!(out, "{}", self.columns.join(","))?;
                }
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    writeln!(out, "{}", cells.join(","))?;
                }
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.to_json())
                    .map_err(|e| std::io::Error::other(e.to_string()))?;
                writeln!(out)?;
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        for (k, v) in &self.meta {
            obj.insert(k.clone(), v.json());
        }
        if !self.columns.is_empty() {
            let rows = self
                .rows
                .iter()
                .map(|row| {
                    let mut r = Map::new();
                    for (c, v) in self.columns.iter().zip(row) {
                        r.insert(c.clone(), v.json());
                    }
                    Value::Object(r)
                })
                .collect();
            obj.insert("rows".into(), Value::Array(rows));
        }
        Value::Object(obj)
    }
}
