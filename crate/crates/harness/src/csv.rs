//! Trace CSV: a header row, then one comma-separated row per iteration with
//! floats at 17 significant digits, enough to round-trip any `f64`.

use std::fmt::Write as _;

use geodesic_opt::convergence::{IterationRecord, IterationTrace};
use thiserror::Error;

pub const FIG1_COLUMNS: [&str; 5] = ["iter", "rho", "grad_norm", "error", "step"];
pub const FIG2_COLUMNS: [&str; 5] = ["iter", "f", "grad_norm", "error", "step"];

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CsvError {
    #[error("empty input")]
    Empty,
    #[error("line {line}: expected 5 fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: cannot parse {field:?}")]
    BadNumber { line: usize, field: String },
    #[error("line {line}: iteration index {found} out of sequence")]
    OutOfSequence { line: usize, found: usize },
    #[error("not a valid trace: {0}")]
    InvalidTrace(String),
}

/// `v` with 17 significant digits in scientific notation.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn trace_to_csv(columns: &[&str; 5], trace: &IterationTrace<f64>) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for r in trace.records() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.index,
            format_float(r.value),
            format_float(r.grad_norm),
            format_float(r.error),
            format_float(r.step)
        );
    }
    out
}

/// Parses a trace written by [`trace_to_csv`], returning the header too.
pub fn parse_trace(text: &str) -> Result<(Vec<String>, IterationTrace<f64>), CsvError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(CsvError::Empty)?;
    let header: Vec<String> = header.split(',').map(str::to_owned).collect();
    if header.len() != 5 {
        return Err(CsvError::FieldCount {
            line: 1,
            found: header.len(),
        });
    }
    let mut records = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(CsvError::FieldCount {
                line: line_no,
                found: fields.len(),
            });
        }
        let bad = |field: &str| CsvError::BadNumber {
            line: line_no,
            field: field.to_owned(),
        };
        let index: usize = fields[0].parse().map_err(|_| bad(fields[0]))?;
        if index != records.len() {
            return Err(CsvError::OutOfSequence {
                line: line_no,
                found: index,
            });
        }
        let mut num = [0.0; 4];
        for (slot, field) in num.iter_mut().zip(&fields[1..]) {
            *slot = field.parse().map_err(|_| bad(field))?;
        }
        records.push(IterationRecord {
            index,
            value: num[0],
            grad_norm: num[1],
            error: num[2],
            step: num[3],
        });
    }
    let trace =
        IterationTrace::from_records(records).map_err(|e| CsvError::InvalidTrace(e.to_string()))?;
    Ok((header, trace))
}
