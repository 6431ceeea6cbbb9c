//! Result tables and documents, written atomically with their provenance
//! (tool version, command and resolved configuration).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // Non-finite numbers have no JSON representation.
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(_) => Value::Null,
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(v) => json!(v),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
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

pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Self {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Where artifacts go: files in a directory, or stdout for the primary one.
pub struct Sink {
    dir: Option<PathBuf>,
    format: Format,
    command: String,
    config: Value,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>, format: Format, command: &str, config: &RunConfig) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)
                .with_context(|| format!("cannot create output directory {}", d.display()))?;
        }
        Ok(Self {
            dir,
            format,
            command: command.to_string(),
            config: serde_json::to_value(config)?,
        })
    }

    fn header_lines(&self) -> String {
        format!(
            "# backreact {VERSION}\n# command: {}\n# config: {}\n",
            self.command, self.config
        )
    }

    fn envelope(&self, body: Value) -> Value {
        json!({
            "version": VERSION,
            "command": self.command,
            "config": self.config,
            "result": body,
        })
    }

    /// Writes a table in the selected format. Only `primary` artifacts go to
    /// stdout when no output directory was given.
    pub fn table(&self, table: &Table, primary: bool) -> Result<()> {
        let (ext, text) = match self.format {
            Format::Csv => {
                let mut s = self.header_lines();
                s.push_str(&table.columns.join(","));
                s.push('\n');
                for row in &table.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                ("csv", s)
            }
            Format::Json => {
                let rows: Vec<Value> = table
                    .rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                    .collect();
                let body = json!({ "columns": table.columns, "rows": rows });
                ("json", pretty(&self.envelope(body))?)
            }
        };
        self.emit(&format!("{}.{ext}", table.name), &text, primary)
    }

    pub fn document<T: Serialize>(&self, name: &str, body: &T, primary: bool) -> Result<()> {
        let text = pretty(&self.envelope(serde_json::to_value(body)?))?;
        self.emit(&format!("{name}.json"), &text, primary)
    }

    fn emit(&self, file: &str, text: &str, primary: bool) -> Result<()> {
        match &self.dir {
            Some(d) => write_atomic(&d.join(file), text.as_bytes()),
            None if primary => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
                Ok(())
            }
            None => {
                eprintln!("note: {file} not written; pass --out DIR to keep it");
                Ok(())
            }
        }
    }
}

fn pretty(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Writes to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .context("output path has no file name")?
        .to_string_lossy()
        .into_owned();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| -> Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.with_context(|| format!("cannot write {}", path.display()))
}
