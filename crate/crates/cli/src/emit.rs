//! CSV and JSON output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::sweep::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("CSV output to {path}: {source}")]
    Csv { path: String, source: csv::Error },
}

/// Where output goes: a file path or stdout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

impl Destination {
    pub fn describe(&self) -> String {
        match self {
            Destination::Stdout => "<stdout>".into(),
            Destination::File(p) => p.display().to_string(),
        }
    }

    pub fn open(&self) -> Result<Box<dyn Write>, EmitError> {
        Ok(match self {
            Destination::Stdout => Box::new(BufWriter::new(io::stdout().lock())),
            Destination::File(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| {
                EmitError::Io { path: self.describe(), source }
            })?)),
        })
    }
}

impl From<Option<&Path>> for Destination {
    fn from(p: Option<&Path>) -> Self {
        match p {
            Some(p) if p != Path::new("-") => Destination::File(p.to_path_buf()),
            _ => Destination::Stdout,
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

fn table_records(table: &Table) -> Vec<Vec<String>> {
    let cell = |v: Option<f64>| v.map(format_number).unwrap_or_default();
    table
        .rows
        .iter()
        .map(|r| {
            let mut rec = Vec::new();
            if table.sweep.is_some() {
                rec.push(cell(r.x));
            }
            rec.push(cell(r.value));
            if table.with_mc {
                rec.push(cell(r.mc.map(|m| m.value)));
                rec.push(cell(r.mc.map(|m| m.std_error)));
            }
            rec
        })
        .collect()
}

fn number(v: Option<f64>) -> Value {
    v.filter(|x| x.is_finite()).map_or(Value::Null, Value::from)
}

fn table_json<S: Serialize>(table: &Table, spec: &S) -> Value {
    let columns = table.columns();
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            let mut vals = Vec::new();
            if table.sweep.is_some() {
                vals.push(number(r.x));
            }
            vals.push(number(r.value));
            if table.with_mc {
                vals.push(number(r.mc.map(|m| m.value)));
                vals.push(number(r.mc.map(|m| m.std_error)));
            }
            let mut obj: Map<String, Value> = columns.iter().map(|c| c.to_string()).zip(vals).collect();
            if let Some(e) = &r.error {
                obj.insert("error".into(), Value::from(e.as_str()));
            }
            Value::Object(obj)
        })
        .collect();
    json!({ "spec": spec, "rows": rows })
}

/// Writes `table` to `dest`. JSON output echoes `spec` next to the rows.
pub fn emit<S: Serialize>(
    table: &Table,
    spec: &S,
    format: Format,
    dest: &Destination,
) -> Result<(), EmitError> {
    let mut out = dest.open()?;
    write_table(table, spec, format, &mut out, dest)?;
    out.flush().map_err(|source| EmitError::Io { path: dest.describe(), source })
}

pub fn write_table<S: Serialize, W: Write>(
    table: &Table,
    spec: &S,
    format: Format,
    out: W,
    dest: &Destination,
) -> Result<(), EmitError> {
    let path = dest.describe();
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let csv_err = |source| EmitError::Csv { path: path.clone(), source };
            w.write_record(table.columns()).map_err(csv_err)?;
            for rec in table_records(table) {
                w.write_record(&rec).map_err(csv_err)?;
            }
            w.flush().map_err(|source| EmitError::Io { path: path.clone(), source })
        }
        Format::Json => {
            let mut out = out;
            let v = table_json(table, spec);
            serde_json::to_writer_pretty(&mut out, &v)
                .map_err(|e| EmitError::Io { path: path.clone(), source: e.into() })?;
            writeln!(out).map_err(|source| EmitError::Io { path, source })
        }
    }
}

/// Writes raw samples, one per line under a `gamma` header, or as a JSON array.
pub fn emit_samples<S: Serialize>(
    samples: &[f64],
    spec: &S,
    format: Format,
    dest: &Destination,
) -> Result<(), EmitError> {
    let path = dest.describe();
    let io_err = |source| EmitError::Io { path: path.clone(), source };
    let mut out = dest.open()?;
    match format {
        Format::Csv => {
            writeln!(out, "gamma").map_err(io_err)?;
            for &v in samples {
                writeln!(out, "{}", format_number(v)).map_err(io_err)?;
            }
        }
        Format::Json => {
            let v = json!({ "spec": spec, "samples": samples });
            serde_json::to_writer(&mut out, &v).map_err(|e| io_err(e.into()))?;
            writeln!(out).map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)
}

/// Machine-readable summary of the rows that failed.
pub fn error_summary(table: &Table) -> Value {
    let errors: Vec<Value> = table
        .errors()
        .map(|r| json!({ "row": r.index, "x": number(r.x), "error": r.error }))
        .collect();
    json!({ "failed_rows": errors.len(), "total_rows": table.rows.len(), "errors": errors })
}
