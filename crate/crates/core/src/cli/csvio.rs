//! Point sets as comma-separated text.
//!
//! One point per row, `d` decimal fields, an optional single header row
//! (detected when any field of the first row is not a number). Output uses
//! the shortest decimal form that parses back to the same `f64`, so a
//! save/load round trip is bit-exact.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::CliError;
use crate::points::PointSet;

pub fn parse_csv(text: &str, dim: usize, source: &str) -> Result<PointSet, CliError> {
    parse_reader(text.as_bytes(), dim, source)
}

pub fn load_csv(path: &Path, dim: usize) -> Result<PointSet, CliError> {
    let source = path.display().to_string();
    let file = File::open(path).map_err(|e| CliError::Input {
        origin: source.clone(),
        line: None,
        message: format!("cannot open: {e}"),
    })?;
    parse_reader(file, dim, &source)
}

fn parse_reader<R: Read>(reader: R, dim: usize, source: &str) -> Result<PointSet, CliError> {
    let bad = |line: u64, message: String| CliError::Input {
        origin: source.to_string(),
        line: Some(line),
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut coords = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            bad(line, e.to_string())
        })?;
        let line = record.position().map_or(k as u64 + 1, |p| p.line());
        if k == 0 && record.iter().any(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if record.len() != dim {
            return Err(bad(line, format!("expected {dim} fields, found {}", record.len())));
        }
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| bad(line, format!("field {} is not a number: {field:?}", j + 1)))?;
            if !v.is_finite() {
                return Err(bad(line, format!("field {} is not finite: {field:?}", j + 1)));
            }
            coords.push(v);
        }
    }
    Ok(PointSet::from_flat(dim, coords)?)
}

pub fn write_csv<W: Write>(ps: &PointSet, out: W) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    for x in ps.iter() {
        let row: Vec<String> = x.iter().map(|v| format!("{v:?}")).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()
}

pub fn save_csv(ps: &PointSet, path: &Path) -> Result<(), CliError> {
    write_csv(ps, File::create(path)?)?;
    Ok(())
}
