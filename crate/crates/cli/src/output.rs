//! Deterministic CSV/JSON emission. CSV uses '.' decimals, UTF-8 and a
//! header row; JSON is a flat record array. Numbers are written with Rust's
//! shortest round-trip formatting, so identical inputs give identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

/// A named table of f64 columns, all the same length.
pub struct Table<'a> {
    pub name: &'a str,
    pub headers: Vec<&'a str>,
    pub columns: Vec<Vec<f64>>,
}

impl<'a> Table<'a> {
    pub fn new(name: &'a str, headers: Vec<&'a str>, columns: Vec<Vec<f64>>) -> Table<'a> {
        assert_eq!(headers.len(), columns.len());
        if let Some(first) = columns.first() {
            assert!(columns.iter().all(|c| c.len() == first.len()));
        }
        Table {
            name,
            headers,
            columns,
        }
    }

    fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(&self.headers.join(","));
        s.push('\n');
        for row in 0..self.n_rows() {
            for (j, col) in self.columns.iter().enumerate() {
                if j > 0 {
                    s.push(',');
                }
                s.push_str(&fmt_f64(col[row]));
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = String::from("[");
        for row in 0..self.n_rows() {
            if row > 0 {
                s.push(',');
            }
            s.push_str("\n  {");
            for (j, col) in self.columns.iter().enumerate() {
                if j > 0 {
                    s.push_str(", ");
                }
                s.push('"');
                s.push_str(self.headers[j]);
                s.push_str("\": ");
                s.push_str(&fmt_json_f64(col[row]));
            }
            s.push('}');
        }
        s.push_str("\n]\n");
        s
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_json_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        "null".into()
    }
}

/// Writes the table in every requested format; returns the paths written.
pub fn write_table(
    dir: &Path,
    table: &Table<'_>,
    formats: &[String],
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for f in formats {
        let (ext, body) = match f.as_str() {
            "csv" => ("csv", table.to_csv()),
            "json" => ("json", table.to_json()),
            other => return Err(CliError::Config(format!("unknown format {other:?}"))),
        };
        let path = dir.join(format!("{}.{ext}", table.name));
        fs::write(&path, body)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}
