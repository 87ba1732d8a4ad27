use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

/// Flat view of a result for the CSV and Markdown formats.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn csv(&self) -> String {
        let quote = |c: &str| {
            if c.contains([',', '"', '\n']) {
                format!("\"{}\"", c.replace('"', "\"\""))
            } else {
                c.to_string()
            }
        };
        let mut out = self.header.join(",") + "\n";
        for row in &self.rows {
            out += &row.iter().map(|c| quote(c)).collect::<Vec<_>>().join(",");
            out.push('\n');
        }
        out
    }

    fn markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "| {} |", self.header.join(" | "));
        let _ = writeln!(out, "|{}", "---|".repeat(self.header.len()));
        for row in &self.rows {
            let _ = writeln!(out, "| {} |", row.join(" | "));
        }
        out
    }
}

/// What a subcommand produced.
pub enum Output {
    Structured { json: Value, table: Table },
    /// Already rendered in the requested format.
    Text(String),
}

impl Output {
    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match self {
            Output::Structured { json, table } => match format {
                Format::Json => serde_json::to_string_pretty(json)? + "\n",
                Format::Csv => table.csv(),
                Format::Markdown => table.markdown(),
            },
            Output::Text(s) => s.clone(),
        })
    }
}

pub fn write(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn num(x: f64) -> String {
    x.to_string()
}
