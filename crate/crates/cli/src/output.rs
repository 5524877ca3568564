//! Rendering of flat records as text, JSON or CSV.
//!
//! Every command builds a list of `(key, Value)` pairs in a fixed order. The
//! same list drives all three formats, so field sets and column order agree.

use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{Map, Number};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Bool(bool),
    Int(u64),
    Real(f64),
    /// Exact integers too large for JSON numbers, rationals, and plain strings.
    Text(String),
}

impl From<Option<u64>> for Value {
    fn from(v: Option<u64>) -> Self {
        v.map_or(Value::Null, Value::Int)
    }
}

impl Value {
    pub fn opt_text<T: ToString>(v: Option<T>) -> Self {
        v.map_or(Value::Null, |t| Value::Text(t.to_string()))
    }

    pub fn opt_real(v: Option<f64>) -> Self {
        v.map_or(Value::Null, Value::Real)
    }

    fn plain(&self) -> String {
        match self {
            Value::Null => String::new(),
            Value::Bool(b) => b.to_string(),
            Value::Int(i) => i.to_string(),
            Value::Real(x) => sig9(*x),
            Value::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Value::Null => serde_json::Value::Null,
            Value::Bool(b) => (*b).into(),
            Value::Int(i) => (*i).into(),
            Value::Real(x) => {
                Number::from_f64(*x).map_or(serde_json::Value::Null, serde_json::Value::Number)
            }
            Value::Text(s) => s.clone().into(),
        }
    }
}

pub type Record = Vec<(&'static str, Value)>;

/// `%.9g`: nine significant digits, trailing zeros dropped.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..9).contains(&exponent) {
        let decimals = (8 - exponent).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.8e}");
        let (mantissa, exp) = s
            .split_once('e')
            .expect("scientific format has an exponent");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exp}")
    }
}

pub fn to_json(record: &Record) -> serde_json::Value {
    let map: Map<String, serde_json::Value> = record
        .iter()
        .map(|(k, v)| (k.to_string(), v.json()))
        .collect();
    serde_json::Value::Object(map)
}

/// Writes one record as `key: value` lines, JSON object, or header plus CSV row.
pub fn write_record<W: Write>(out: &mut W, format: Format, record: &Record) -> io::Result<()> {
    match format {
        Format::Text => {
            let width = record.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in record {
                let shown = match v {
                    Value::Null => "-".to_string(),
                    other => other.plain(),
                };
                writeln!(out, "{k:<width$}  {shown}")?;
            }
            Ok(())
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &to_json(record))?;
            writeln!(out)
        }
        Format::Csv => write_table(
            out,
            format,
            &record.iter().map(|(k, _)| *k).collect::<Vec<_>>(),
            std::slice::from_ref(record),
        ),
    }
}

/// Writes rows sharing the given header. Text output is column-aligned.
pub fn write_table<W: Write>(
    out: &mut W,
    format: Format,
    header: &[&str],
    rows: &[Record],
) -> io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(header)?;
            for row in rows {
                w.write_record(row.iter().map(|(_, v)| v.plain()))?;
            }
            w.flush()
        }
        Format::Json => {
            let array: Vec<serde_json::Value> = rows.iter().map(to_json).collect();
            serde_json::to_writer_pretty(&mut *out, &array)?;
            writeln!(out)
        }
        Format::Text => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|(_, v)| match v {
                            Value::Null => "-".to_string(),
                            other => other.plain(),
                        })
                        .collect()
                })
                .collect();
            let widths: Vec<usize> = header
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    cells
                        .iter()
                        .map(|r| r[i].len())
                        .chain([h.len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |fields: Vec<&str>| {
                let padded: Vec<String> = fields
                    .iter()
                    .zip(&widths)
                    .map(|(f, w)| format!("{f:>w$}"))
                    .collect();
                padded.join("  ").trim_end().to_string()
            };
            writeln!(out, "{}", line(header.to_vec()))?;
            for row in &cells {
                writeln!(out, "{}", line(row.iter().map(String::as_str).collect()))?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(2.05776161175839), "2.05776161");
        assert_eq!(sig9(1437.0), "1437");
        assert_eq!(sig9(0.09844007281325252), "0.0984400728");
        assert_eq!(sig9(9.913685985759088e-13), "9.91368599e-13");
        assert_eq!(sig9(123456789012.0), "1.23456789e11");
        assert_eq!(sig9(-0.5), "-0.5");
        assert_eq!(sig9(0.0), "0");
    }

    #[test]
    fn csv_nulls_are_empty() {
        let record: Record = vec![
            ("a", Value::Int(1)),
            ("b", Value::Null),
            ("c", Value::Real(0.25)),
        ];
        let mut out = Vec::new();
        write_record(&mut out, Format::Csv, &record).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "a,b,c\n1,,0.25\n");
    }

    #[test]
    fn json_keeps_field_order() {
        let record: Record = vec![("z", Value::Int(1)), ("a", Value::Text("big".into()))];
        assert_eq!(to_json(&record).to_string(), r#"{"z":1,"a":"big"}"#);
    }
}
