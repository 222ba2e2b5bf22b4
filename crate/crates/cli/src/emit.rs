//! Report rendering. Everything goes through a JSON value first so the
//! three formats share one field order (declaration order of the structs).

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub struct Report {
    value: Value,
    /// Table used for CSV instead of the single flattened row.
    rows: Option<Vec<Value>>,
}

pub fn rows<T: Serialize>(items: &[T]) -> Vec<Value> {
    items.iter().map(to_value).collect()
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

impl Report {
    pub fn of<T: Serialize>(v: &T) -> Self {
        Self { value: to_value(v), rows: None }
    }

    pub fn with_rows<T: Serialize>(v: &T, rows: Vec<Value>) -> Self {
        Self { value: to_value(v), rows: Some(rows) }
    }

    pub fn render(&self, f: Format) -> Vec<u8> {
        match f {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.value).expect("json");
                s.push('\n');
                s.into_bytes()
            }
            Format::Text => {
                let mut out = String::new();
                for (k, v) in flatten(&self.value) {
                    out.push_str(&format!("{k}: {v}\n"));
                }
                out.into_bytes()
            }
            Format::Csv => {
                let rows: Vec<Vec<(String, String)>> = match &self.rows {
                    Some(rs) => rs.iter().map(flatten).collect(),
                    None => vec![flatten(&self.value)],
                };
                let mut w = csv::Writer::from_writer(Vec::new());
                if let Some(first) = rows.first() {
                    w.write_record(first.iter().map(|(k, _)| k)).expect("csv");
                }
                for r in &rows {
                    w.write_record(r.iter().map(|(_, v)| v)).expect("csv");
                }
                w.into_inner().expect("csv flush")
            }
        }
    }
}

/// Dotted paths to scalar leaves, in document order.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    walk(v, String::new(), &mut out);
    out
}

fn walk(v: &Value, path: String, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if path.is_empty() { k.to_string() } else { format!("{path}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| walk(x, join(k), out)),
        Value::Array(xs) => xs.iter().enumerate().for_each(|(i, x)| walk(x, join(&i.to_string()), out)),
        Value::String(s) => out.push((path, s.clone())),
        Value::Null => out.push((path, String::new())),
        other => out.push((path, other.to_string())),
    }
}
