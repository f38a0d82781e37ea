use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use cascade_core::{CMatrix, C64};
use clap::ValueEnum;
use serde_json::Value;

use crate::failure::{Failure, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn complex_pair(z: C64) -> Value {
    serde_json::json!([z.re, z.im])
}

/// Rows of `[re, im]` pairs.
pub fn complex_rows(m: &CMatrix) -> Value {
    Value::Array(
        m.row_iter()
            .map(|row| Value::Array(row.iter().map(|&z| complex_pair(z)).collect()))
            .collect(),
    )
}

/// Plain CSV table with a header; cells are preformatted.
#[derive(Debug, Clone, Default)]
pub struct Table {
    text: String,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: impl IntoIterator<Item = S>) -> Self {
        let mut table = Self::default();
        table.push_cells(header);
        table
    }

    fn push_cells<S: AsRef<str>>(&mut self, cells: impl IntoIterator<Item = S>) {
        for (i, cell) in cells.into_iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            self.text.push_str(cell.as_ref());
        }
        self.text.push('\n');
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: impl IntoIterator<Item = S>) {
        self.push_cells(cells);
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub fn json_text(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialise");
    text.push('\n');
    text
}

/// Write the artifact to `path`, or to stdout.
pub fn write_output(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::validation(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::validation(format!("cannot write to stdout: {e}")))
        }
    }
}

/// Human-oriented notes on stderr, silenced by `--quiet`.
#[derive(Debug, Clone, Copy)]
pub struct Reporter {
    pub quiet: bool,
}

impl Reporter {
    pub fn note(&self, args: std::fmt::Arguments<'_>) {
        if !self.quiet {
            let mut line = String::new();
            let _ = line.write_fmt(args);
            eprintln!("{line}");
        }
    }
}
