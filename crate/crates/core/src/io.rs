//! Amplitude-table ingestion and CSV/JSON output helpers.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Reads `(index, alpha)` records. A header row is allowed; indices must
/// cover `0..len` exactly once.
pub fn read_alphas_csv<R: Read>(reader: R) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut entries: Vec<(usize, f64)> = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() < 2 {
            return Err(Error::InvalidArgument(format!("row {line}: expected `index,alpha`")));
        }
        let (Ok(index), Ok(alpha)) = (record[0].parse::<usize>(), record[1].parse::<f64>()) else {
            if line == 0 {
                continue;
            }
            return Err(Error::InvalidArgument(format!("row {line}: cannot parse `{:?}`", record)));
        };
        entries.push((index, alpha));
    }
    let mut alphas = vec![f64::NAN; entries.len()];
    for (index, alpha) in entries {
        match alphas.get_mut(index) {
            Some(slot) if slot.is_nan() => *slot = alpha,
            Some(_) => return Err(Error::InvalidArgument(format!("index {index} repeated"))),
            None => return Err(Error::InvalidArgument(format!("index {index} out of range"))),
        }
    }
    if alphas.is_empty() {
        return Err(Error::EmptyInput("amplitude table"));
    }
    Ok(alphas)
}

/// Reads a JSON array of amplitudes.
pub fn read_alphas_json<R: Read>(reader: R) -> Result<Vec<f64>> {
    let alphas: Vec<f64> = serde_json::from_reader(reader)?;
    if alphas.is_empty() {
        return Err(Error::EmptyInput("amplitude table"));
    }
    Ok(alphas)
}

/// Dispatches on the file extension (`.json`, anything else is CSV).
pub fn read_alphas_path(path: &Path) -> Result<Vec<f64>> {
    let file = File::open(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => read_alphas_json(file),
        _ => read_alphas_csv(file),
    }
}

pub fn write_csv<T: Serialize, W: Write>(writer: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    write_csv(BufWriter::new(File::create(path)?), rows)
}

pub fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}
