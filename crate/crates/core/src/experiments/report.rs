use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format {other:?} (expected csv or json)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// A report is a flat table of rows plus an overall verdict.
///
/// CSV output carries only the rows; JSON output is the whole report.
pub trait Report: Serialize {
    type Row: Serialize;

    fn rows(&self) -> &[Self::Row];

    /// Whether every check the report makes holds.
    fn passed(&self) -> bool;
}

pub fn write_report<R: Report, W: Write>(report: &R, format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in report.rows() {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// One reported quantity with its provenance and optional reference value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantityRow {
    pub quantity: &'static str,
    pub method: &'static str,
    pub value: f64,
    pub stderr: Option<f64>,
    pub reference: Option<f64>,
    pub rel_error: Option<f64>,
    pub note: String,
}

impl QuantityRow {
    pub fn exact(quantity: &'static str, method: &'static str, value: f64) -> Self {
        QuantityRow {
            quantity,
            method,
            value,
            stderr: None,
            reference: None,
            rel_error: None,
            note: String::new(),
        }
    }

    pub fn with_reference(mut self, reference: f64) -> Self {
        self.reference = Some(reference);
        self.rel_error = Some(rel_error(self.value, reference));
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

/// `|value - reference| / |reference|`, or the absolute error when the reference is zero.
pub fn rel_error(value: f64, reference: f64) -> f64 {
    let err = (value - reference).abs();
    if reference == 0.0 {
        err
    } else {
        err / reference.abs()
    }
}
