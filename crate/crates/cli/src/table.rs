//! Column-oriented numeric tables and their CSV / JSON encodings.
//!
//! Numbers are written with 17 significant digits so that values survive a
//! write/read cycle bit for bit.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| CliError::Config(format!("writing CSV: {e}"));
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_value(*v)))
                .map_err(csv_err)?;
        }
        w.flush().map_err(CliError::io("writing CSV"))
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut out, self)
            .map_err(|e| CliError::Config(format!("writing JSON: {e}")))?;
        writeln!(out).map_err(CliError::io("writing JSON"))
    }

    pub fn write(&self, format: Format, out: impl Write) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    /// Writes to `path`, or to stdout when `path` is `None`.
    pub fn write_to(&self, format: Format, path: Option<&Path>) -> Result<(), CliError> {
        match path {
            Some(p) => {
                let file =
                    File::create(p).map_err(CliError::io(format!("creating {}", p.display())))?;
                self.write(format, BufWriter::new(file))
            }
            None => self.write(format, io::stdout().lock()),
        }
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, CliError> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(input);
        let headers = r
            .headers()
            .map_err(|e| CliError::Config(format!("reading CSV header: {e}")))?
            .clone();
        if headers.is_empty() || headers.iter().all(str::is_empty) {
            return Err(CliError::Config("CSV has no header row".into()));
        }
        let mut table = Table::new(headers.iter());
        for (line, record) in r.records().enumerate() {
            let record = record.map_err(|e| CliError::Config(format!("reading CSV: {e}")))?;
            let row = record
                .iter()
                .map(|field| {
                    field.trim().parse::<f64>().map_err(|_| {
                        CliError::Config(format!("CSV row {}: '{field}' is not a number", line + 1))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            table.push(row);
        }
        Ok(table)
    }

    pub fn read_csv_file(path: &Path) -> Result<Self, CliError> {
        let file =
            File::open(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::read_csv(file)
    }
}

/// Scientific notation with 17 significant digits; NaN as `NaN`.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_lossless() {
        let mut t = Table::new(["t", "x"]);
        t.push(vec![0.0, 1.0 / 3.0]);
        t.push(vec![std::f64::consts::LN_2, -2.5e-300]);
        t.push(vec![1.0, f64::NAN]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = Table::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.columns, t.columns);
        assert_eq!(back.rows[..2], t.rows[..2]);
        assert!(back.rows[2][1].is_nan());
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_value(0.25), "2.5000000000000000e-1");
        assert_eq!(format_value(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(Table::read_csv("".as_bytes()).is_err());
        assert!(Table::read_csv("t,x\n0,abc\n".as_bytes()).is_err());
    }

    #[test]
    fn json_lists_columns_and_rows() {
        let mut t = Table::new(["t"]);
        t.push(vec![0.5]);
        let mut buf = Vec::new();
        t.write_json(&mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["columns"][0], "t");
        assert_eq!(v["rows"][0][0], 0.5);
    }
}
