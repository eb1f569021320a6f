//! Tabular reports (CSV or JSON lines) and `key=value` summaries.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use halfspace_ns::{ReportFormat, Result};
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "pass" } else { "fail" }.into())
    }
}

/// Shortest round-trip representation, with `inf`/`-inf`/`nan` spelled out.
pub fn real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => real(*v),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::Number((*v).into()),
            Cell::Real(v) => Number::from_f64(*v).map_or_else(|| Value::String(real(*v)), Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: ReportFormat) -> String {
        let mut out = String::new();
        match format {
            ReportFormat::Csv => {
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            ReportFormat::JsonLines => {
                for row in &self.rows {
                    let obj: Map<String, Value> = self.columns.iter().map(|c| c.to_string()).zip(row.iter().map(Cell::json)).collect();
                    let _ = writeln!(out, "{}", Value::Object(obj));
                }
            }
        }
        out
    }

    /// Write as `<stem>.csv` or `<stem>.jsonl`.
    pub fn write(&self, dir: &Path, stem: &str, format: ReportFormat) -> Result<()> {
        let ext = match format {
            ReportFormat::Csv => "csv",
            ReportFormat::JsonLines => "jsonl",
        };
        fs::write(dir.join(format!("{stem}.{ext}")), self.render(format))?;
        Ok(())
    }
}

/// Ordered `key=value` lines, also echoed to stdout.
#[derive(Debug, Default)]
pub struct Summary {
    lines: Vec<(String, String)>,
}

impl Summary {
    pub fn put(&mut self, key: &str, value: impl Into<Cell>) {
        let v = match value.into() {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => real(v),
            Cell::Text(s) => s,
        };
        self.lines.push((key.into(), v));
    }

    pub fn render(&self) -> String {
        self.lines.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        let text = self.render();
        print!("{text}");
        fs::write(dir.join(format!("{stem}.txt")), text)?;
        Ok(())
    }
}
