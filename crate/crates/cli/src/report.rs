use std::io::Write;

use anyhow::Result;
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Default)]
pub struct Table {
    pub title: Option<String>,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, headers: &[&str]) -> Self {
        Table {
            title: Some(title.into()),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    fn write_text(&self, out: &mut impl Write) -> Result<()> {
        if let Some(t) = &self.title {
            writeln!(out, "{t}")?;
        }
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect::<Vec<_>>()
                .join("  ")
        };
        writeln!(out, "{}", line(&self.headers))?;
        for row in &self.rows {
            writeln!(out, "{}", line(row))?;
        }
        Ok(())
    }

    fn write_csv(&self, out: &mut impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        out.write_all(&w.into_inner()?)?;
        Ok(())
    }
}

/// What a command hands back: tables for text/CSV, a JSON value, and
/// whether every assertion-class check passed.
pub struct Report {
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
    pub result: Value,
    pub passed: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Envelope<'a> {
    schema_version: u32,
    config: &'a RunConfig,
    passed: bool,
    notes: &'a [String],
    result: &'a Value,
}

impl Report {
    pub fn write(&self, config: &RunConfig, format: Format, out: &mut impl Write) -> Result<()> {
        match format {
            Format::Json => {
                let env = Envelope {
                    schema_version: SCHEMA_VERSION,
                    config,
                    passed: self.passed,
                    notes: &self.notes,
                    result: &self.result,
                };
                serde_json::to_writer_pretty(&mut *out, &env)?;
                writeln!(out)?;
            }
            Format::Table => {
                for (i, t) in self.tables.iter().enumerate() {
                    if i > 0 {
                        writeln!(out)?;
                    }
                    t.write_text(out)?;
                }
                for n in &self.notes {
                    writeln!(out, "note: {n}")?;
                }
                writeln!(out, "{}", if self.passed { "status: ok" } else { "status: CHECK FAILED" })?;
            }
            Format::Csv => {
                for (i, t) in self.tables.iter().enumerate() {
                    if i > 0 {
                        writeln!(out)?;
                    }
                    t.write_csv(out)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_is_aligned() {
        let mut t = Table::new("q", &["n", "value"]);
        t.push(vec!["1".into(), "0".into()]);
        t.push(vec!["10".into(), "14762".into()]);
        let mut buf = Vec::new();
        t.write_text(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "q\nn   value\n1       0\n10  14762\n");
    }

    #[test]
    fn csv_quotes_commas() {
        let mut t = Table::new("x", &["poly"]);
        t.push(vec!["1,2".into()]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "poly\n\"1,2\"\n");
    }
}
