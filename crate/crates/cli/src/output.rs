use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::config::Format;
use crate::error::CliError;

/// Significant digits in a JSON number literal.
fn significant_digits(literal: &str) -> usize {
    let mantissa = literal.split(['e', 'E']).next().unwrap_or("");
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let trimmed = digits.trim_start_matches('0');
    // Trailing zeros of an integer are placeholders, not precision.
    let trimmed = if mantissa.contains('.') { trimmed } else { trimmed.trim_end_matches('0') };
    trimmed.len()
}

/// Replaces numbers carrying more than 15 significant digits by their
/// decimal text, so that readers parsing into doubles lose nothing silently.
pub fn stringify_long_numbers(v: &mut Value) {
    match v {
        Value::Number(n) => {
            let text = n.to_string();
            if significant_digits(&text) > 15 {
                *v = Value::String(text);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(stringify_long_numbers),
        Value::Object(map) => map.values_mut().for_each(stringify_long_numbers),
        _ => {}
    }
}

pub fn render_json(report: &Value) -> Result<Vec<u8>, CliError> {
    let mut v = report.clone();
    stringify_long_numbers(&mut v);
    let mut out = serde_json::to_vec_pretty(&v)?;
    out.push(b'\n');
    Ok(out)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// A header and rows of already-formatted cells.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_values<'a>(&mut self, values: impl IntoIterator<Item = &'a Value>) {
        self.rows.push(values.into_iter().map(cell).collect());
    }

    /// `field,value` rows for every scalar of a JSON object, in key order.
    pub fn fields(obj: &Value) -> Self {
        let mut t = Table::new(["field", "value"]);
        if let Value::Object(map) = obj {
            for (k, v) in map {
                if !v.is_object() && !v.is_array() {
                    t.rows.push(vec![k.clone(), cell(v)]);
                }
            }
        }
        t
    }

    pub fn render(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| CliError::Output(e.to_string()))
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

pub fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

pub fn render(format: Format, report: &Value, table: &Table) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => render_json(report),
        Format::Csv => table.render(),
    }
}
