//! CSV and JSON writers for result tables.
//!
//! CSV layout, all lines `\n`-terminated:
//!
//! ```text
//! # qrsim <version>
//! # provenance <provenance as one-line JSON>
//! # warning <text>              (zero or more)
//! # summary <key> <number>      (zero or more, sorted by key)
//! <column>,<column>,...
//! <number>,<number>,...         (one line per row)
//! ```
//!
//! Numbers use the shortest decimal form that parses back to the same `f64`.
//! JSON is the serialized [`ResultTable`]: an object with `columns`, `rows`,
//! `provenance`, `warnings` and `summary`.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::ResultTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    /// `json` for a `.json` extension, CSV otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// Shortest round-trip decimal form.
pub fn format_number(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        // integral values without a trailing ".0"
        format!("{v}")
    } else {
        format!("{v:?}")
    }
}

pub fn to_csv(table: &ResultTable) -> Result<String> {
    let provenance = serde_json::to_string(&table.provenance).map_err(|e| Error::Io(e.to_string()))?;
    let mut out = String::new();
    writeln!(out, "# {}", table.provenance.code_version).expect("string write");
    writeln!(out, "# provenance {provenance}").expect("string write");
    for w in &table.warnings {
        writeln!(out, "# warning {}", w.replace('\n', " ")).expect("string write");
    }
    for (key, value) in &table.summary {
        writeln!(out, "# summary {key} {}", format_number(*value)).expect("string write");
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn to_json(table: &ResultTable) -> Result<String> {
    let mut s = serde_json::to_string_pretty(table).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<ResultTable> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn render(table: &ResultTable, format: Format) -> Result<String> {
    table.check()?;
    match format {
        Format::Csv => to_csv(table),
        Format::Json => to_json(table),
    }
}

pub fn write_output(table: &ResultTable, path: &Path, format: Format) -> Result<()> {
    let text = render(table, format)?;
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_json(path: &Path) -> Result<ResultTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    from_json(&text)
}
