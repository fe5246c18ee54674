//! Text encodings for tables and reports.
//!
//! Floats are written with 17 significant digits in scientific notation so
//! every `f64` round-trips exactly and the output never depends on locale.

use std::io::{self, Write};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{KdError, Result};
use crate::kd::KdTable;
use crate::linalg::CMatrix;

pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        // avoid "-0"
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

/// JSON shape of a KD table: entries are `[re, im]` pairs in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdTableRecord {
    pub dim: usize,
    pub a_basis_label: String,
    pub f_basis_label: String,
    pub entries: Vec<[f64; 2]>,
}

impl KdTableRecord {
    pub fn from_table(q: &KdTable) -> Self {
        Self {
            dim: q.dim(),
            a_basis_label: q.a_basis().label().to_string(),
            f_basis_label: q.f_basis().label().to_string(),
            entries: q.entries().as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    /// Entries as a `dim x dim` matrix.
    pub fn matrix(&self) -> Result<CMatrix> {
        CMatrix::from_row_major(
            self.dim,
            self.dim,
            self.entries.iter().map(|[re, im]| C64::new(*re, *im)).collect(),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record is serializable")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// `i,j,re,im` rows, header first.
pub fn write_kd_csv<W: Write>(q: &KdTable, mut out: W) -> io::Result<()> {
    writeln!(out, "i,j,re,im")?;
    let d = q.dim();
    for i in 0..d {
        for j in 0..d {
            let z = q.entry(i, j);
            writeln!(out, "{i},{j},{},{}", format_f64(z.re), format_f64(z.im))?;
        }
    }
    Ok(())
}

/// Parse rows written by [`write_kd_csv`] back into a `dim x dim` matrix.
pub fn read_kd_csv(text: &str) -> Result<CMatrix> {
    let mut cells = Vec::new();
    for line in text.lines().filter(|l| !l.is_empty() && !l.starts_with('#')).skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(KdError::InvalidState(format!("bad KD CSV row: {line}")));
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| KdError::InvalidState(format!("bad number {s:?}: {e}")))
        };
        let parse_idx = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| KdError::InvalidState(format!("bad index {s:?}: {e}")))
        };
        cells.push((
            parse_idx(fields[0])?,
            parse_idx(fields[1])?,
            C64::new(parse(fields[2])?, parse(fields[3])?),
        ));
    }
    let d = (cells.len() as f64).sqrt().round() as usize;
    if d * d != cells.len() || d == 0 {
        return Err(KdError::InvalidState(format!(
            "{} KD rows is not a square count",
            cells.len()
        )));
    }
    let mut m = CMatrix::zeros(d, d);
    for (i, j, z) in cells {
        if i >= d || j >= d {
            return Err(KdError::IndexOutOfRange {
                index: i.max(j),
                dim: d,
            });
        }
        m[(i, j)] = z;
    }
    Ok(m)
}
