//! Numeric CSV tables.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Columns must all have at least this many rows.
pub const MIN_ROWS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    source: Option<PathBuf>,
}

impl Dataset {
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::domain(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        if names.is_empty() {
            return Err(Error::domain("dataset has no columns"));
        }
        for (k, name) in names.iter().enumerate() {
            if names[..k].contains(name) {
                return Err(Error::domain(format!("duplicate column name {name:?}")));
            }
        }
        let n = columns[0].len();
        if let Some((name, col)) = names.iter().zip(&columns).find(|(_, c)| c.len() != n) {
            return Err(Error::domain(format!(
                "column {name:?} has {} rows, expected {n}",
                col.len()
            )));
        }
        if n < MIN_ROWS {
            return Err(Error::domain(format!(
                "need at least {MIN_ROWS} rows, got {n}"
            )));
        }
        if let Some(name) = names
            .iter()
            .zip(&columns)
            .find(|(_, c)| c.iter().any(|v| !v.is_finite()))
            .map(|(n, _)| n)
        {
            return Err(Error::domain(format!(
                "column {name:?} has non-finite values"
            )));
        }
        Ok(Self {
            names,
            columns,
            source: None,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_rows(&self) -> usize {
        self.columns[0].len()
    }

    pub fn source(&self) -> Option<&Path> {
        self.source.as_deref()
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|k| self.columns[k].as_slice())
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }
}

/// Parse a comma-separated file with a header row. Cells are parsed with
/// Rust's locale-independent float grammar after trimming whitespace.
pub fn parse_dataset_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut ds = parse_dataset_bytes(&bytes, path)?;
    ds.source = Some(path.to_path_buf());
    Ok(ds)
}

/// As [`parse_dataset_csv`], for in-memory content; `origin` is only used in messages.
pub fn parse_dataset_bytes(bytes: &[u8], origin: &Path) -> Result<Dataset> {
    let parse_err = |message: String| Error::Parse {
        path: origin.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let header = reader
        .headers()
        .map_err(|e| parse_err(e.to_string()))?
        .clone();
    if header.is_empty() || header.iter().all(str::is_empty) {
        return Err(parse_err("no header".into()));
    }
    let names: Vec<String> = header.iter().map(str::to_string).collect();
    if let Some(k) = names.iter().position(String::is_empty) {
        return Err(parse_err(format!("header column {} is empty", k + 1)));
    }
    for (k, name) in names.iter().enumerate() {
        if names[..k].contains(name) {
            return Err(parse_err(format!("duplicate column name {name:?}")));
        }
    }
    let mut columns = vec![Vec::new(); names.len()];
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        // Row 1 is the header; data rows are numbered from 2 like a spreadsheet.
        let row = idx + 2;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != names.len() {
            return Err(parse_err(format!(
                "row {row}: expected {} cells, found {}",
                names.len(),
                record.len()
            )));
        }
        for (k, cell) in record.iter().enumerate() {
            if cell.is_empty() {
                return Err(parse_err(format!(
                    "row {row}, column {:?}: missing value",
                    names[k]
                )));
            }
            let v: f64 = cell.parse().map_err(|_| {
                parse_err(format!(
                    "row {row}, column {:?}: {cell:?} is not a number",
                    names[k]
                ))
            })?;
            if !v.is_finite() {
                return Err(parse_err(format!(
                    "row {row}, column {:?}: {cell:?} is not finite",
                    names[k]
                )));
            }
            columns[k].push(v);
        }
    }
    let n = columns[0].len();
    if n < MIN_ROWS {
        return Err(parse_err(format!(
            "need at least {MIN_ROWS} data rows, got {n}"
        )));
    }
    Dataset::new(names, columns).map_err(|e| parse_err(e.to_string()))
}
