//! Number formatting, CSV tables and JSON envelopes.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Fixed 12-significant-digit rendering. Magnitudes in `[1e-5, 1e15)` are
/// written positionally with trailing zeros trimmed; others in scientific
/// notation. `NaN` becomes an empty field.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return String::new();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exponent) {
        let decimals = (11 - exponent).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    #[serde(rename = "J")]
    pub j: f64,
    pub k: f64,
}

/// A numeric table; `NaN` marks a missing value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows
            .push(row.iter().map(|&x| if x.is_nan() { None } else { Some(x) }).collect());
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| format_number(c.unwrap_or(f64::NAN))))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Common wrapper of every JSON document the CLI writes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope<T> {
    pub schema_version: u32,
    pub kind: String,
    pub seed: u64,
    pub units: Units,
    pub data: T,
}

pub enum Sink<'a> {
    Stdout,
    File(&'a Path),
}

impl Sink<'_> {
    pub fn open(&self) -> io::Result<Box<dyn Write>> {
        Ok(match self {
            Sink::Stdout => Box::new(io::stdout().lock()),
            Sink::File(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_number(0.419724375227041), "0.419724375227");
        assert_eq!(format_number(-1.2814577238707523), "-1.28145772387");
        assert_eq!(format_number(100.0), "100");
        assert_eq!(format_number(2.5e-9), "2.50000000000e-9");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(f64::NAN), "");
        assert_eq!(format_number(123456.0000001), "123456");
    }
}
