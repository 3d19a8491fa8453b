//! Table assembly and deterministic CSV/JSON emission.
//!
//! Every file starts with a provenance block (tool version, command,
//! parameters) so the output is self-describing; nothing time- or
//! machine-dependent is written, keeping repeated runs byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// A rendered table: ordered provenance parameters, column headers and
/// formatted cells.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub params: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(command: impl Into<String>) -> Self {
        Table {
            tool: "shepp".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            params: Vec::new(),
            columns: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn param(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.params.push((key.into(), value.to_string()));
        self
    }

    pub fn columns(&mut self, columns: impl IntoIterator<Item = impl Into<String>>) -> &mut Self {
        self.columns = columns.into_iter().map(Into::into).collect();
        self
    }

    pub fn row(&mut self, cells: Vec<String>) -> &mut Self {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
        self
    }

    fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {} {}", self.tool, self.version);
        let _ = writeln!(s, "# command: {}", self.command);
        for (k, v) in &self.params {
            let _ = writeln!(s, "# {k}: {v}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }

    fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Csv => Ok(self.to_csv()),
            OutputFormat::Json => self.to_json(),
        }
    }

    /// Write to `out` (or stdout). Any non-finite numeric formatted earlier
    /// shows up as NaN/inf text; refuse to emit those.
    pub fn write(&self, format: OutputFormat, out: Option<&Path>) -> Result<()> {
        for row in &self.rows {
            for cell in row {
                if cell.contains("NaN") || cell.contains("inf") {
                    bail!(
                        "refusing to write non-finite cell {cell:?} in row {:?} of {}",
                        row.first(),
                        self.command
                    );
                }
            }
        }
        let rendered = self.render(format)?;
        match out {
            Some(path) => fs::write(path, rendered)
                .with_context(|| format!("writing {}", path.display()))?,
            None => io::stdout().write_all(rendered.as_bytes())?,
        }
        Ok(())
    }
}

/// Fixed-point cell with `dp` decimals.
pub fn fixed(value: f64, dp: usize) -> String {
    format!("{value:.dp$}")
}

/// Scientific notation like printf %.*e (two-digit exponent, explicit sign).
pub fn sci(value: f64, digits: usize) -> String {
    if value == 0.0 {
        return format!("{:.digits$}e+00", 0.0);
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let formatted = format!("{value:.digits$e}");
    // Rust renders "3.94e0" / "1.29e-4"; normalize the exponent field.
    let (mantissa, exponent) = formatted.split_once('e').expect("exponential format");
    let exp: i32 = exponent.parse().expect("numeric exponent");
    format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}
