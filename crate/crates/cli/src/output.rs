//! Number formatting and the CSV / OBJ / gnuplot writers.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use heisenberg_cmc::Point;

use crate::CliError;

/// Shortest decimal that parses back to the same `f64`, in exponent form
/// outside `[1e-4, 1e16)`; empty for non-finite values.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// `-` is standard output.
pub fn open(path: &str) -> Result<Box<dyn Write>, CliError> {
    if path == "-" {
        return Ok(Box::new(io::stdout().lock()));
    }
    let f = File::create(Path::new(path))
        .map_err(|e| CliError::input(format!("cannot create {path}: {e}")))?;
    Ok(Box::new(BufWriter::new(f)))
}

pub fn write_csv(path: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(open(path)?);
    w.write_record(header).map_err(CliError::csv)?;
    for row in rows {
        w.write_record(row.iter().map(|&x| num(x)))
            .map_err(CliError::csv)?;
    }
    w.flush().map_err(CliError::io)
}

/// Polyline as OBJ: one `v` per point and a single `l` element.
pub fn write_obj(path: &str, points: &[Point]) -> Result<(), CliError> {
    let mut w = open(path)?;
    for p in points {
        writeln!(w, "v {} {} {}", num(p.x), num(p.y), num(p.t)).map_err(CliError::io)?;
    }
    if !points.is_empty() {
        let idx: Vec<String> = (1..=points.len()).map(|i| i.to_string()).collect();
        writeln!(w, "l {}", idx.join(" ")).map_err(CliError::io)?;
    }
    w.flush().map_err(CliError::io)
}

/// Whitespace-separated columns with a `#` header, for `plot`/`splot`.
pub fn write_columns(path: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut w = open(path)?;
    writeln!(w, "# {}", header.join(" ")).map_err(CliError::io)?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| num(x)).collect();
        writeln!(w, "{}", cells.join(" ")).map_err(CliError::io)?;
    }
    w.flush().map_err(CliError::io)
}

pub fn write_json<T: serde::Serialize>(path: &str, value: &T) -> Result<(), CliError> {
    let mut w = open(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| match e.io_error_kind() {
        Some(kind) => CliError::io(kind.into()),
        None => CliError::numeric(e.to_string()),
    })?;
    writeln!(w).map_err(CliError::io)?;
    w.flush().map_err(CliError::io)
}
