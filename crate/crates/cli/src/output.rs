//! Data-file and metadata-sidecar writers.
//!
//! CSV files carry a '#'-prefixed header block (the resolved config) and a
//! column-name row; JSON mirrors the rows as an array of records. Rows are
//! emitted in grid order with shortest-roundtrip float formatting, so
//! identical configs produce bit-identical data files. Volatile fields
//! (wall time) go only to the sidecar.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{Format, RunConfig};

/// One table cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Text(s) => {
                if s.contains(',') || s.contains('"') {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.clone()
                }
            }
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(v) if v.is_finite() => serde_json::json!(v),
            Cell::Num(_) => serde_json::Value::Null,
            Cell::Text(s) => serde_json::json!(s),
            Cell::Flag(b) => serde_json::json!(b),
        }
    }
}

/// Shortest representation that round-trips.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v}")
    }
}

/// Result table of one run.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Per-run metadata written next to the data file.
#[derive(Debug, Serialize)]
pub struct Metadata {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    pub columns: Vec<String>,
    pub rows: usize,
    pub failed_rows: usize,
    pub wall_time_s: f64,
    /// Boundary-optimum and convergence notes collected during the run.
    pub flags: Vec<String>,
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    out.with_file_name(name)
}

pub fn write_table(
    out: &Path,
    format: Format,
    config: &RunConfig,
    table: &Table,
) -> std::io::Result<()> {
    let mut file = std::fs::File::create(out)?;
    match format {
        Format::Csv => {
            writeln!(file, "# fermitherm {}", config.command)?;
            writeln!(file, "# version: {}", env!("CARGO_PKG_VERSION"))?;
            let cfg_json = serde_json::to_value(config).expect("config serialises");
            if let serde_json::Value::Object(map) = cfg_json {
                for (k, v) in map {
                    writeln!(file, "# {k}: {v}")?;
                }
            }
            writeln!(file, "{}", table.columns.join(","))?;
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                writeln!(file, "{}", cells.join(","))?;
            }
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: serde_json::Map<String, serde_json::Value> = table
                        .columns
                        .iter()
                        .zip(row.iter())
                        .map(|(c, cell)| (c.to_string(), cell.json()))
                        .collect();
                    serde_json::Value::Object(obj)
                })
                .collect();
            serde_json::to_writer_pretty(&mut file, &rows)?;
            writeln!(file)?;
        }
    }
    Ok(())
}

pub fn write_metadata(out: &Path, meta: &Metadata) -> std::io::Result<()> {
    let file = std::fs::File::create(sidecar_path(out))?;
    serde_json::to_writer_pretty(file, meta)?;
    Ok(())
}
