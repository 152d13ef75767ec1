//! Number formatting and small file helpers shared by the exporters.

use crate::error::Result;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// Scientific notation with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Writes a CSV table of floats with a header row.
pub fn write_table(path: impl AsRef<Path>, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| fmt17(x)))?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON with every float at 17 significant digits.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    render(&v, 0, &mut out);
    Ok(out)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(to_json_string(value)?.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}

/// One compact JSON document per line.
pub fn write_json_lines<T: Serialize>(path: impl AsRef<Path>, items: impl IntoIterator<Item = T>) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    for it in items {
        let v = serde_json::to_value(&it)?;
        let mut line = String::new();
        render_compact(&v, &mut line);
        f.write_all(line.as_bytes())?;
        f.write_all(b"\n")?;
    }
    f.flush()?;
    Ok(())
}

fn number(n: &serde_json::Number, out: &mut String) {
    match (n.as_i64(), n.as_u64(), n.as_f64()) {
        (Some(i), _, _) => out.push_str(&i.to_string()),
        (_, Some(u), _) => out.push_str(&u.to_string()),
        (_, _, Some(f)) => out.push_str(&fmt17(f)),
        _ => out.push_str(&n.to_string()),
    }
}

fn render(v: &serde_json::Value, indent: usize, out: &mut String) {
    use serde_json::Value;
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Number(n) => number(n, out),
        Value::Array(items) if !items.is_empty() => {
            out.push_str("[\n");
            for (k, it) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                render(it, indent + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (k, (key, it)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                render(it, indent + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

fn render_compact(v: &serde_json::Value, out: &mut String) {
    use serde_json::Value;
    match v {
        Value::Number(n) => number(n, out),
        Value::Array(items) => {
            out.push('[');
            for (k, it) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                render_compact(it, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (k, (key, it)) in map.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push(':');
                render_compact(it, out);
            }
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_roundtrip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17);
        }
    }

    #[test]
    fn json_numbers_are_formatted() {
        let s = to_json_string(&serde_json::json!({"a": 0.5, "n": 3, "v": [1.5]})).unwrap();
        assert!(s.contains("5.0000000000000000e-1"));
        assert!(s.contains("\"n\": 3"));
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"], 0.5);
    }
}
