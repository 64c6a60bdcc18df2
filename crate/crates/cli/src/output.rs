//! Output writers: CSV with `#`-prefixed metadata lines, or JSON with the
//! same metadata embedded.  All floating-point cells are rendered with a
//! fixed `{:.12e}` format so reruns of an identical configuration produce
//! byte-identical files.

use crate::config::{OutputFormat, RunConfig};
use anyhow::{Context, Result};
use serde::Serialize;
use std::fs::File;
use std::io::Write;
use std::path::Path;

/// One table cell.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Text(String),
    Int(u64),
    Float(f64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.12e}"),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// A rectangular result table.
pub struct Sheet {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Sheet {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

fn create_output_file(path: &Path) -> Result<File> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("cannot create output directory {}", parent.display()))?;
        }
    }
    File::create(path).with_context(|| format!("cannot create output file {}", path.display()))
}

/// Writes the table in the configured format; returns the row count.
pub fn write_sheet(config: &RunConfig, sheet: &Sheet) -> Result<usize> {
    match config.format {
        OutputFormat::Csv => write_csv(config, sheet),
        OutputFormat::Json => {
            let value = serde_json::json!({
                "columns": sheet.columns,
                "rows": sheet.rows,
            });
            write_json(config, &value)
        }
    }
    .map(|()| sheet.rows.len())
}

fn write_csv(config: &RunConfig, sheet: &Sheet) -> Result<()> {
    let mut file = create_output_file(&config.output)?;
    writeln!(file, "# permutherm {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(file, "# command: {}", config.command)?;
    writeln!(file, "# seed: {}", config.seed)?;
    writeln!(file, "# config: {}", serde_json::to_string(config)?)?;
    let mut writer = csv::Writer::from_writer(file);
    writer.write_record(&sheet.columns)?;
    for row in &sheet.rows {
        writer.write_record(row.iter().map(|c| c.render()))?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes a JSON document with the standard metadata envelope; the
/// payload lands under `"result"` (tables pass their columns/rows there).
pub fn write_json(config: &RunConfig, payload: &serde_json::Value) -> Result<()> {
    let document = serde_json::json!({
        "tool": "permutherm",
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "result": payload,
    });
    let mut file = create_output_file(&config.output)?;
    serde_json::to_writer_pretty(&mut file, &document)?;
    writeln!(file)?;
    Ok(())
}
