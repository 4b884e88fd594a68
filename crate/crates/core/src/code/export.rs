//! Parity-check matrix export in alist and CSV layouts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};

use super::CodeSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Alist,
    Csv,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alist" => Ok(ExportFormat::Alist),
            "csv" => Ok(ExportFormat::Csv),
            other => Err(Error::Usage(format!("unknown export format {other:?} (alist|csv)"))),
        }
    }
}

/// MacKay alist text: `n m`, maximum degrees, column degrees, row degrees,
/// then 1-based row indices per column and column indices per row, each list
/// zero-padded to the maximum degree.
pub fn to_alist(m: &BitMatrix) -> String {
    let cols = m.transpose();
    let col_deg: Vec<usize> = cols.rows().iter().map(BitVec::weight).collect();
    let row_deg: Vec<usize> = m.rows().iter().map(BitVec::weight).collect();
    let max_col = col_deg.iter().copied().max().unwrap_or(0);
    let max_row = row_deg.iter().copied().max().unwrap_or(0);
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let padded = |v: &BitVec, width: usize| {
        let mut idx: Vec<usize> = v.iter_ones().map(|i| i + 1).collect();
        idx.resize(width, 0);
        join(&idx)
    };

    let mut out = String::new();
    let _ = writeln!(out, "{} {}", m.ncols(), m.nrows());
    let _ = writeln!(out, "{max_col} {max_row}");
    let _ = writeln!(out, "{}", join(&col_deg));
    let _ = writeln!(out, "{}", join(&row_deg));
    for c in cols.rows() {
        let _ = writeln!(out, "{}", padded(c, max_col));
    }
    for r in m.rows() {
        let _ = writeln!(out, "{}", padded(r, max_row));
    }
    out
}

pub fn to_csv(m: &BitMatrix) -> String {
    let mut out = String::new();
    for r in m.rows() {
        let line: Vec<&str> = (0..m.ncols()).map(|c| if r.get(c) { "1" } else { "0" }).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

fn format_err(what: &str) -> Error {
    Error::Format(format!("malformed parity-check file: {what}"))
}

pub fn parse_alist(text: &str) -> Result<BitMatrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let mut numbers = |what: &str| -> Result<Vec<usize>> {
        lines
            .next()
            .ok_or_else(|| format_err(what))?
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| format_err(what)))
            .collect()
    };
    let header = numbers("header")?;
    let [n, m] = header[..] else { return Err(format_err("header")) };
    numbers("max degrees")?;
    numbers("column degrees")?;
    numbers("row degrees")?;
    for _ in 0..n {
        numbers("column list")?;
    }
    let mut rows = Vec::with_capacity(m);
    for _ in 0..m {
        let idx = numbers("row list")?;
        if idx.iter().any(|&i| i > n) {
            return Err(format_err("column index out of range"));
        }
        rows.push(BitVec::from_indices(n, idx.into_iter().filter(|&i| i > 0).map(|i| i - 1)));
    }
    BitMatrix::new(n, rows)
}

pub fn parse_csv(text: &str) -> Result<BitMatrix> {
    let rows: Vec<BitVec> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let bits: Vec<bool> = l
                .split(',')
                .map(|t| match t.trim() {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    _ => Err(format_err("csv entry")),
                })
                .collect::<Result<_>>()?;
            Ok(BitVec::from_bools(&bits))
        })
        .collect::<Result<_>>()?;
    let n = rows.first().map_or(0, BitVec::len);
    BitMatrix::new(n, rows).map_err(|_| format_err("ragged csv rows"))
}

/// Writes the Z-stabilizer matrix (rows = stabilizers, columns = qubits).
pub fn export_parity_check(code: &CodeSpec, format: ExportFormat, path: &Path) -> Result<()> {
    let m = code.z_stabilizer_matrix();
    let text = match format {
        ExportFormat::Alist => to_alist(&m),
        ExportFormat::Csv => to_csv(&m),
    };
    fs::write(path, text)?;
    Ok(())
}

pub fn read_parity_check(format: ExportFormat, path: &Path) -> Result<BitMatrix> {
    let text = fs::read_to_string(path)?;
    match format {
        ExportFormat::Alist => parse_alist(&text),
        ExportFormat::Csv => parse_csv(&text),
    }
}
