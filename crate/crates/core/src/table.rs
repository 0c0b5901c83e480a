//! Figure CSV format shared with the plotting scripts.
//!
//! One row per (T, ω) grid point, temperature-major, with the header [`FIGURE_HEADER`].
//! Reals are written with 17 significant digits in `.` decimal notation; flags are `0`/`1`.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::spectra::SpectralPoint;
use crate::sweep::SweepResult;

pub const FIGURE_COLUMNS: [&str; 8] = [
    "omega_rad_s",
    "temperature_K",
    "var_u",
    "var_v",
    "comm_abs",
    "E",
    "entangled",
    "epr",
];

pub const FIGURE_HEADER: &str = "omega_rad_s,temperature_K,var_u,var_v,comm_abs,E,entangled,epr";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureRow {
    pub omega: f64,
    pub temperature: f64,
    pub var_u: f64,
    pub var_v: f64,
    pub comm_abs: f64,
    pub entanglement_degree: f64,
    pub entangled: bool,
    pub epr: bool,
}

impl From<&SpectralPoint> for FigureRow {
    fn from(p: &SpectralPoint) -> Self {
        Self {
            omega: p.omega,
            temperature: p.temperature,
            var_u: p.var_u,
            var_v: p.var_v,
            comm_abs: p.comm_abs,
            entanglement_degree: p.entanglement_degree,
            entangled: p.flags.product_entangled,
            epr: p.flags.epr,
        }
    }
}

fn real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn write_row<W: Write>(out: &mut W, row: &FigureRow) -> std::io::Result<()> {
    writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        real(row.omega),
        real(row.temperature),
        real(row.var_u),
        real(row.var_v),
        real(row.comm_abs),
        real(row.entanglement_degree),
        u8::from(row.entangled),
        u8::from(row.epr),
    )
}

pub fn write_figure_csv<W: Write>(out: &mut W, sweep: &SweepResult) -> std::io::Result<()> {
    writeln!(out, "{FIGURE_HEADER}")?;
    for p in &sweep.points {
        write_row(out, &FigureRow::from(p))?;
    }
    Ok(())
}

fn table_error(line: usize, message: impl Into<String>) -> Error {
    Error::Table {
        line,
        message: message.into(),
    }
}

fn parse_real(line: usize, column: &str, s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| table_error(line, format!("column `{column}`: `{s}` is not a number")))
}

fn parse_flag(line: usize, column: &str, s: &str) -> Result<bool> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(table_error(
            line,
            format!("column `{column}`: `{s}` is not 0 or 1"),
        )),
    }
}

/// Reads a figure CSV; columns may appear in any order but all must be present.
pub fn read_figure_csv<R: BufRead>(input: R) -> Result<Vec<FigureRow>> {
    let mut lines = input.lines().enumerate();
    let header = match lines.next() {
        Some((_, Ok(h))) => h,
        Some((_, Err(e))) => return Err(table_error(1, e.to_string())),
        None => return Err(table_error(1, "empty file")),
    };
    let names: Vec<&str> = header.trim().split(',').map(str::trim).collect();
    let mut index = [0usize; 8];
    for (slot, col) in index.iter_mut().zip(FIGURE_COLUMNS) {
        *slot = names
            .iter()
            .position(|n| *n == col)
            .ok_or_else(|| table_error(1, format!("missing column `{col}`")))?;
    }
    let mut rows = Vec::new();
    for (n, line) in lines {
        let line_no = n + 1;
        let line = line.map_err(|e| table_error(line_no, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != names.len() {
            return Err(table_error(
                line_no,
                format!("expected {} fields, found {}", names.len(), fields.len()),
            ));
        }
        let f = |i: usize| fields[index[i]];
        rows.push(FigureRow {
            omega: parse_real(line_no, FIGURE_COLUMNS[0], f(0))?,
            temperature: parse_real(line_no, FIGURE_COLUMNS[1], f(1))?,
            var_u: parse_real(line_no, FIGURE_COLUMNS[2], f(2))?,
            var_v: parse_real(line_no, FIGURE_COLUMNS[3], f(3))?,
            comm_abs: parse_real(line_no, FIGURE_COLUMNS[4], f(4))?,
            entanglement_degree: parse_real(line_no, FIGURE_COLUMNS[5], f(5))?,
            entangled: parse_flag(line_no, FIGURE_COLUMNS[6], f(6))?,
            epr: parse_flag(line_no, FIGURE_COLUMNS[7], f(7))?,
        });
    }
    Ok(rows)
}
