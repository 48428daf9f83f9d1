//! Column tables and their CSV/JSON serializations.
//!
//! Numbers are printed with 17 significant digits, which round-trips every
//! finite f64; identical tables therefore serialize to identical bytes.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

/// Output encodings of a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

/// Column-oriented numeric table with optional metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub meta: Vec<(String, String)>,
}

/// 17 significant digits; round-trip safe for 64-bit floats.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            meta: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    /// Comma-separated, header row, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Single object with "meta" (strings) and "data" (column arrays).
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n  \"meta\": {");
        for (i, (k, v)) in self.meta.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "\n    \"{}\": \"{}\"", escape(k), escape(v));
        }
        out.push_str("\n  },\n  \"data\": {");
        for (c, name) in self.columns.iter().enumerate() {
            if c > 0 {
                out.push(',');
            }
            let _ = write!(out, "\n    \"{}\": [", escape(name));
            for (i, row) in self.rows.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&fmt_f64(row[c]));
            }
            out.push(']');
        }
        out.push_str("\n  }\n}\n");
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn write(&self, path: &Path, format: Format) -> io::Result<()> {
        std::fs::write(path, self.render(format))
    }

    /// Parse the CSV encoding back (used by round-trip checks and the
    /// radial-file charge loader).
    pub fn from_csv(text: &str) -> Result<Table, String> {
        let mut lines = text.lines();
        let header = lines.next().ok_or("empty csv")?;
        let columns: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: Result<Vec<f64>, String> = line
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<f64>()
                        .map_err(|e| format!("line {}: {e}", lineno + 2))
                })
                .collect();
            let row = row?;
            if row.len() != columns.len() {
                return Err(format!("line {}: wrong column count", lineno + 2));
            }
            rows.push(row);
        }
        Ok(Table {
            columns,
            rows,
            meta: Vec::new(),
        })
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let mut t = Table::new(&["r", "phi"]);
        t.push(vec![0.1, std::f64::consts::PI]);
        t.push(vec![1.0 / 3.0, f64::MIN_POSITIVE]);
        t.push(vec![-1.5e300, 2.2250738585072014e-308]);
        let parsed = Table::from_csv(&t.to_csv()).unwrap();
        assert_eq!(t.columns, parsed.columns);
        for (a, b) in t.rows.iter().flatten().zip(parsed.rows.iter().flatten()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn json_shape() {
        let mut t = Table::new(&["x"]).with_meta("dims", 3);
        t.push(vec![1.0]);
        let json = t.to_json();
        assert!(json.contains("\"meta\""));
        assert!(json.contains("\"dims\": \"3\""));
        assert!(json.contains("\"x\": [1.0000000000000000e0]"));
    }
}
