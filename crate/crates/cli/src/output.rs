//! Rendering of result rows as CSV, JSON or aligned text.
//!
//! Rows are serialised to ordered JSON objects first, so every format shows
//! the same field names in the same order.

use std::io::Write;

use friable::Result;
use serde::Serialize;
use serde_json::{Map, Value};

/// Decimal form with 17 significant digits; parses back to the same `f64`.
pub fn sig17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Serialises rows to JSON objects, keeping field order.
pub fn to_objects<T: Serialize>(rows: &[T]) -> Result<Vec<Map<String, Value>>> {
    rows.iter()
        .map(|r| match serde_json::to_value(r).map_err(std::io::Error::from)? {
            Value::Object(m) => Ok(m),
            other => {
                let mut m = Map::new();
                m.insert("value".into(), other);
                Ok(m)
            }
        })
        .collect()
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => sig17(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        nested => nested.to_string(),
    }
}

fn text_cell(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn write_csv<W: Write>(rows: &[Map<String, Value>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if let Some(first) = rows.first() {
        w.write_record(first.keys()).map_err(std::io::Error::from)?;
    }
    for row in rows {
        w.write_record(row.values().map(csv_cell)).map_err(std::io::Error::from)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[Map<String, Value>], mut out: W) -> Result<()> {
    let v = match rows {
        [one] => Value::Object(one.clone()),
        many => Value::Array(many.iter().cloned().map(Value::Object).collect()),
    };
    serde_json::to_writer_pretty(&mut out, &v).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

/// One `key  value` line per field for a single row, an aligned table
/// otherwise.
pub fn write_text<W: Write>(rows: &[Map<String, Value>], mut out: W) -> Result<()> {
    match rows {
        [] => {}
        [one] => {
            let flat = || one.iter().filter(|(_, v)| !v.is_array() && !v.is_object());
            let width = flat().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in flat() {
                writeln!(out, "{k:<width$}  {}", text_cell(v))?;
            }
        }
        many => {
            let keys: Vec<&String> = many[0].keys().collect();
            let cells: Vec<Vec<String>> = many
                .iter()
                .map(|r| keys.iter().map(|k| r.get(*k).map(text_cell).unwrap_or_default()).collect())
                .collect();
            let widths: Vec<usize> = keys
                .iter()
                .enumerate()
                .map(|(i, k)| cells.iter().map(|c| c[i].len()).max().unwrap_or(0).max(k.len()))
                .collect();
            let line = |fields: Vec<&str>| {
                fields
                    .iter()
                    .zip(&widths)
                    .map(|(f, w)| format!("{f:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            writeln!(out, "{}", line(keys.iter().map(|k| k.as_str()).collect()))?;
            for c in &cells {
                writeln!(out, "{}", line(c.iter().map(String::as_str).collect()))?;
            }
        }
    }
    Ok(())
}
