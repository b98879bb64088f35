//! Report documents and their JSON / CSV emission.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Rows for the CSV form of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub seed: u64,
    pub config: Map<String, Value>,
    pub result: Value,
    pub table: Table,
}

/// A float rounded to 12 significant digits; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
        Value::from(rounded)
    } else if x.is_nan() {
        Value::from("nan")
    } else if x > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// Integers past `u64` are written as decimal strings.
pub fn big(x: u128) -> Value {
    u64::try_from(x).map_or_else(|_| Value::from(x.to_string()), Value::from)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Report {
    pub fn document(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        doc.insert("command".into(), Value::from(self.command));
        doc.insert("seed".into(), Value::from(self.seed));
        doc.insert("config".into(), Value::Object(self.config.clone()));
        doc.insert("result".into(), self.result.clone());
        Value::Object(doc)
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut text = serde_json::to_string_pretty(&self.document()).expect("values serialize");
                text.push('\n');
                Ok(text)
            }
            Format::Csv => {
                let config = serde_json::to_string(&self.config).expect("values serialize");
                let mut out = format!(
                    "# gridlab {} {} seed={} config={config}\n",
                    env!("CARGO_PKG_VERSION"),
                    self.command,
                    self.seed
                );
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.table.header).map_err(CliError::Csv)?;
                for row in &self.table.rows {
                    w.write_record(row.iter().map(cell)).map_err(CliError::Csv)?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))?;
                out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
                Ok(out)
            }
        }
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<(), CliError> {
        let text = self.render(format)?;
        match out {
            Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source }),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
            }
        }
    }
}
