//! Minimal CSV writer/reader pair: comma separator, `.` decimal point, one
//! header row, LF line endings. Floats print in the shortest form that parses
//! back to the same bits, so a file re-read by [`read_csv`] reproduces the
//! grid exactly.

use crate::error::{CliError, CliResult};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Int(i64),
    Float(f64),
    Str(String),
}

impl Field {
    fn render(&self, out: &mut String) {
        match self {
            Field::Int(v) => {
                let _ = write!(out, "{v}");
            }
            Field::Float(v) => {
                // both forms print the shortest string that parses back to
                // the same bits; exponent form keeps extreme magnitudes short
                let a = v.abs();
                if a != 0.0 && !(1e-4..1e16).contains(&a) {
                    let _ = write!(out, "{v:e}");
                } else {
                    let _ = write!(out, "{v}");
                }
            }
            Field::Str(s) => out.push_str(s),
        }
    }
}

pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = Vec<Field>>,
{
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        let mut first = true;
        for field in &row {
            if !first {
                text.push(',');
            }
            first = false;
            field.render(&mut text);
        }
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

/// Read a CSV written by [`write_csv`]: returns the header and raw string
/// cells. Use [`parse_float`] to recover floats bit-exactly.
pub fn read_csv(path: &Path) -> CliResult<(Vec<String>, Vec<Vec<String>>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::runtime(format!("{}: empty csv", path.display())))?
        .split(',')
        .map(str::to_owned)
        .collect();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect();
    Ok((header, rows))
}

pub fn parse_float(cell: &str) -> CliResult<f64> {
    cell.parse()
        .map_err(|_| CliError::runtime(format!("not a float: {cell:?}")))
}
