use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use crate::Format;

/// Numeric table with named columns.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sink(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

impl Table {
    pub fn write(&self, w: &mut dyn Write, format: Format) -> io::Result<()> {
        match format {
            Format::Csv => {
                writeln!(w, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|&x| num(x)).collect();
                    writeln!(w, "{}", cells.join(","))?;
                }
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, &x)| (c.to_string(), float(x)))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                serde_json::to_writer(&mut *w, &rows)?;
                writeln!(w)?;
            }
        }
        w.flush()
    }
}

/// Non-finite values become `null`.
pub fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Nested record as pretty JSON or as flattened `key,value` lines.
pub fn write_record(w: &mut dyn Write, value: &Value, format: Format) -> io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
        }
        Format::Csv => {
            writeln!(w, "key,value")?;
            let mut lines = Vec::new();
            flatten("", value, &mut lines);
            for (k, v) in lines {
                writeln!(w, "{k},{v}")?;
            }
        }
    }
    w.flush()
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&join(k), v, out)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&join(&i.to_string()), v, out)),
        Value::Number(n) => {
            let text = match (n.as_u64(), n.as_i64(), n.as_f64()) {
                (Some(u), _, _) => u.to_string(),
                (_, Some(i), _) => i.to_string(),
                (_, _, Some(f)) => num(f),
                _ => n.to_string(),
            };
            out.push((prefix.to_string(), text));
        }
        Value::Null => out.push((prefix.to_string(), "nan".to_string())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_table_layout() {
        let t = Table {
            columns: vec!["a", "b"],
            rows: vec![vec![1.0, -0.5]],
        };
        let mut buf = Vec::new();
        t.write(&mut buf, Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "a,b\n1.0000000000000000e0,-5.0000000000000000e-1\n");
    }

    #[test]
    fn flattened_keys() {
        let v = serde_json::json!({"x": {"d": 2, "s": 0.25}, "n": null});
        let mut buf = Vec::new();
        write_record(&mut buf, &v, Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("x.d,2\n"));
        assert!(text.contains("x.s,2.5000000000000000e-1\n"));
        assert!(text.contains("n,nan\n"));
    }
}
