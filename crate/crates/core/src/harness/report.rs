use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::metrics::{MetricsTable, COLUMNS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

/// Renders `table` as text. CSV and JSON are lossless; Markdown drops columns
/// that are empty in every row and rounds to four decimals.
pub fn emit_report(table: &MetricsTable, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(table)? + "\n"),
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(COLUMNS)?;
            for row in &table.rows {
                w.serialize(row)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(e.to_string()))
        }
        ReportFormat::Markdown => Ok(markdown(table)),
    }
}

/// Parses the CSV emitted by [`emit_report`].
pub fn read_report_csv(text: &str) -> Result<MetricsTable> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let rows = r.deserialize().collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(MetricsTable { rows })
}

fn markdown(table: &MetricsTable) -> String {
    let columns: Vec<&str> = if table.is_empty() {
        COLUMNS.to_vec()
    } else {
        COLUMNS
            .iter()
            .copied()
            .filter(|c| table.rows.iter().any(|r| !r.cell(c).is_empty()))
            .collect()
    };
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", columns.join(" | "));
    let _ = writeln!(out, "|{}", columns.iter().map(|_| "---|").collect::<String>());
    for row in &table.rows {
        let cells: Vec<String> = columns
            .iter()
            .map(|c| {
                let text = row.cell(c);
                match text.parse::<f64>() {
                    Ok(v) if text.contains('.') => format!("{v:.4}"),
                    _ => text,
                }
            })
            .collect();
        let _ = writeln!(out, "| {} |", cells.join(" | "));
    }
    out
}
