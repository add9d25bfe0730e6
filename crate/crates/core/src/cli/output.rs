//! Tabular report rows and their CSV/JSON rendering.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::error::Result;

/// One report cell. The variant fixes how it is printed in CSV.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    /// Six decimals.
    Prob(f64),
    /// Degrees, two decimals.
    Angle(f64),
    /// Explicit number of decimals.
    Fixed(f64, usize),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn csv(&self) -> String {
        match self {
            Cell::Prob(v) => fmt_fixed(*v, 6),
            Cell::Angle(v) => fmt_fixed(*v, 2),
            Cell::Fixed(v, d) => fmt_fixed(*v, *d),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        let number = |v: f64| Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null);
        match self {
            Cell::Prob(v) | Cell::Angle(v) | Cell::Fixed(v, _) => number(*v),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

/// Avoids printing `-0.000000`.
fn fmt_fixed(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Header plus rows, all of equal length.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.header)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv))?;
                }
                w.flush()?;
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .header
                            .iter()
                            .zip(row)
                            .map(|(h, c)| (h.to_string(), c.json()))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut *out, &rows)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }

    /// Writes to `path`, or to stdout when no path is given.
    pub fn emit(&self, format: Format, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) => {
                let mut f = io::BufWriter::new(File::create(p)?);
                self.write(format, &mut f)?;
                f.flush()?;
            }
            None => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                self.write(format, &mut lock)?;
            }
        }
        Ok(())
    }

    pub fn to_string(&self, format: Format) -> Result<String> {
        let mut buf = Vec::new();
        self.write(format, &mut buf)?;
        Ok(String::from_utf8_lossy(&buf).into_owned())
    }
}
