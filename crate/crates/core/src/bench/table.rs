use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matana::fmt_f64;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            Cell::Text(s) => s.parse().ok(),
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
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

/// Experiment output: a `#` comment line describing the run, a header, rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub comment: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(comment: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            comment: comment.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::param(format!("no column named {name:?}")))
    }

    /// Numeric values of `name` for the rows accepted by `keep`.
    pub fn numbers(&self, name: &str, keep: impl Fn(&[Cell]) -> bool) -> Result<Vec<f64>> {
        let idx = self.column_index(name)?;
        Ok(self
            .rows
            .iter()
            .filter(|r| keep(r))
            .filter_map(|r| r[idx].as_f64())
            .collect())
    }

    /// Rows whose `column` holds the text `value`.
    pub fn rows_where<'a>(&'a self, column: &str, value: &'a str) -> Result<impl Iterator<Item = &'a Vec<Cell>> + 'a> {
        let idx = self.column_index(column)?;
        Ok(self.rows.iter().filter(move |r| r[idx].as_str() == Some(value)))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# {}", self.comment).unwrap();
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}
