//! Comma-separated output with a `#` header.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    /// Meaning and unit, e.g. `sweep delay [1/eps0]`.
    pub description: String,
}

impl Column {
    pub fn new(name: impl Into<String>, description: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            description: description.into(),
        }
    }
}

/// Numeric table; every row has one value per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub notes: Vec<String>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

/// Shortest representation that parses back to the same bits; exponent
/// form for very small or very large magnitudes.
pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || a.is_infinite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl Table {
    pub fn new(title: impl Into<String>, columns: Vec<Column>) -> Self {
        Table {
            title: title.into(),
            notes: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.title);
        for note in &self.notes {
            let _ = writeln!(out, "# {note}");
        }
        for c in &self.columns {
            let _ = writeln!(out, "# {}: {}", c.name, c.description);
        }
        let names: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        let _ = writeln!(out, "# {}", names.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Reads back a table written by [`Table::to_csv`]; descriptions and
    /// notes are not recovered.
    pub fn parse_csv(text: &str) -> Option<Table> {
        let mut header = None;
        let mut title = None;
        let mut rows = Vec::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("# ") {
                title.get_or_insert_with(|| rest.to_string());
                header = Some(rest);
            } else if !line.is_empty() {
                let row = line.split(',').map(|c| c.parse::<f64>().ok()).collect::<Option<Vec<_>>>()?;
                rows.push(row);
            }
        }
        let columns = header?.split(',').map(|n| Column::new(n, "")).collect();
        let mut table = Table::new(title?, columns);
        for row in rows {
            if row.len() != table.columns.len() {
                return None;
            }
            table.rows.push(row);
        }
        Some(table)
    }
}
