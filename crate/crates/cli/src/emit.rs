//! CSV tables and the JSON run summary.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use mindet_core::verify::{Bound, Check, Note};
use serde::Serialize;

/// `printf("%.12e")`: twelve mantissa digits, signed exponent of at least two digits.
pub fn sci(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Column-major numeric table written as one CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            header: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn column(mut self, header: impl Into<String>, values: Vec<f64>) -> Self {
        if let Some(first) = self.columns.first() {
            assert_eq!(first.len(), values.len(), "column length mismatch in {}", self.name);
        }
        self.header.push(header.into());
        self.columns.push(values);
        self
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        let mut line = String::new();
        for r in 0..self.rows() {
            line.clear();
            for (c, col) in self.columns.iter().enumerate() {
                if c > 0 {
                    line.push(',');
                }
                line.push_str(&sci(col[r]));
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub observed: f64,
    pub threshold: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl From<Check> for Verdict {
    fn from(c: Check) -> Self {
        Self {
            name: c.name,
            observed: c.observed,
            threshold: c.threshold,
            bound: c.bound,
            pass: c.pass,
        }
    }
}

/// Everything one run produces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultBundle {
    pub experiment: String,
    pub version: String,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub files: Vec<String>,
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<Note>,
    pub pass: bool,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl ResultBundle {
    pub fn new(experiment: &str, config: serde_json::Value, config_hash: String) -> Self {
        Self {
            experiment: experiment.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash,
            config,
            files: Vec::new(),
            verdicts: Vec::new(),
            notes: Vec::new(),
            pass: true,
            tables: Vec::new(),
        }
    }

    pub fn check(&mut self, c: Check) {
        self.pass &= c.pass;
        self.verdicts.push(c.into());
    }

    pub fn note(&mut self, name: impl Into<String>, value: f64) {
        self.notes.push(Note {
            name: name.into(),
            value,
        });
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// CSV tables plus `summary.json`.
    Csv,
    /// `summary.json` only.
    Json,
}

/// Writes the bundle under `dir` and returns the paths written, summary last.
pub fn emit(bundle: &mut ResultBundle, dir: &Path, format: Format) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    bundle.files.clear();
    if format == Format::Csv {
        for t in &bundle.tables {
            let path = dir.join(t.file_name());
            let mut w = io::BufWriter::new(fs::File::create(&path)?);
            t.write_csv(&mut w)?;
            w.flush()?;
            bundle.files.push(t.file_name());
            written.push(path);
        }
    }
    let path = dir.join("summary.json");
    let mut json = serde_json::to_string_pretty(bundle).map_err(io::Error::other)?;
    json.push('\n');
    fs::write(&path, json)?;
    written.push(path);
    Ok(written)
}
