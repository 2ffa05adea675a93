use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::args::Format;
use crate::error::{CliError, CliResult};

/// A numeric table with a header row.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Comma-separated, LF line endings, 17 significant digits per value.
    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Input(format!("csv: {e}"));
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_float(*v))).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| CliError::Input(format!("csv: {e}")))
    }

    /// Array of objects keyed by the header.
    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.header.iter().zip(row).map(|(h, v)| (h.to_string(), Value::from(*v))).collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }

    pub fn render(&self, format: Format) -> CliResult<Vec<u8>> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut bytes = serde_json::to_vec_pretty(&self.to_json()).expect("numbers serialize");
                bytes.push(b'\n');
                Ok(bytes)
            }
        }
    }
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(CliError::io(path))
}

pub fn write_json<W: Write + ?Sized>(out: &mut W, value: &impl serde::Serialize) -> CliResult<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report serializes");
    bytes.push(b'\n');
    out.write_all(&bytes).map_err(CliError::io("<stdout>"))
}
