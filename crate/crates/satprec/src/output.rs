use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub subcommand: String,
    pub config_path: PathBuf,
    pub output_dir: PathBuf,
    pub seed: Option<u64>,
}

impl RunManifest {
    fn header_lines(&self) -> Vec<String> {
        vec![
            format!("# tool: satprec {}", self.tool_version),
            format!("# subcommand: {}", self.subcommand),
            format!("# config: {}", self.config_path.display()),
            format!("# output_dir: {}", self.output_dir.display()),
            format!(
                "# seed: {}",
                self.seed.map_or_else(|| "none".to_string(), |s| s.to_string())
            ),
        ]
    }
}

/// Numeric table written as CSV or as JSON rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// 17 significant digits; `inf`, `-inf` and `NaN` pass through.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Sink {
    pub manifest: RunManifest,
    pub format: Format,
    pub stem: String,
}

impl Sink {
    fn path(&self, ext: &str) -> PathBuf {
        self.manifest.output_dir.join(format!("{}.{ext}", self.stem))
    }

    fn create(&self, path: &Path) -> Result<BufWriter<File>, CliError> {
        let io = |source| CliError::Write {
            path: path.to_path_buf(),
            source,
        };
        fs::create_dir_all(&self.manifest.output_dir).map_err(io)?;
        Ok(BufWriter::new(File::create(path).map_err(io)?))
    }

    pub fn table(&self, table: &Table) -> Result<PathBuf, CliError> {
        match self.format {
            Format::Csv => {
                let path = self.path("csv");
                let mut w = self.create(&path)?;
                self.write_header(&mut w, &path)?;
                let mut csv = csv::Writer::from_writer(w);
                csv.write_record(&table.columns)?;
                for row in &table.rows {
                    csv.write_record(row.iter().map(|&x| fmt_f64(x)))?;
                }
                csv.flush().map_err(|source| CliError::Write { path: path.clone(), source })?;
                Ok(path)
            }
            Format::Json => {
                let rows: Vec<Value> = table
                    .rows
                    .iter()
                    .map(|r| Value::Object(table.columns.iter().map(|c| c.to_string()).zip(r.iter().map(|&x| number(x))).collect()))
                    .collect();
                self.json(&json!({ "manifest": self.manifest, "rows": rows }))
            }
        }
    }

    /// A structured report: JSON as is, or flattened to `quantity,value` rows.
    pub fn report<T: Serialize>(&self, report: &T) -> Result<PathBuf, CliError> {
        let value = serde_json::to_value(report)?;
        match self.format {
            Format::Json => self.json(&json!({ "manifest": self.manifest, "report": value })),
            Format::Csv => {
                let path = self.path("csv");
                let mut w = self.create(&path)?;
                self.write_header(&mut w, &path)?;
                let mut csv = csv::Writer::from_writer(w);
                csv.write_record(["quantity", "value"])?;
                let mut flat = Vec::new();
                flatten("", &value, &mut flat);
                for (k, v) in flat {
                    csv.write_record([k, v])?;
                }
                csv.flush().map_err(|source| CliError::Write { path: path.clone(), source })?;
                Ok(path)
            }
        }
    }

    /// JSON file next to a CSV output, always written.
    pub fn sidecar<T: Serialize>(&self, extra: &T) -> Result<PathBuf, CliError> {
        let value = json!({ "manifest": self.manifest, "summary": serde_json::to_value(extra)? });
        let path = self.path("json");
        self.write_json(&path, &value)?;
        Ok(path)
    }

    fn json(&self, value: &Value) -> Result<PathBuf, CliError> {
        let path = self.path("json");
        self.write_json(&path, value)?;
        Ok(path)
    }

    fn write_json(&self, path: &Path, value: &Value) -> Result<(), CliError> {
        let mut w = self.create(path)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w).and_then(|_| w.flush()).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        })
    }

    fn write_header(&self, w: &mut impl Write, path: &Path) -> Result<(), CliError> {
        for line in self.manifest.header_lines() {
            writeln!(w, "{line}").map_err(|source| CliError::Write {
                path: path.to_path_buf(),
                source,
            })?;
        }
        Ok(())
    }
}

fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(fmt_f64(x))
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        Value::Number(n) => out.push((prefix.to_string(), n.as_f64().map_or_else(|| n.to_string(), fmt_f64))),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::Null => out.push((prefix.to_string(), String::new())),
    }
}
