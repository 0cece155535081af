//! CSV emission and ingestion. Numbers are written with 17 significant
//! digits so that every file parses back to the same `f64`.

use std::fs;
use std::path::Path;

use crate::error::{CliError, Result};

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a CSV file through a temporary sibling and a rename, so readers
/// never observe a partial file.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let tmp = path.with_extension("csv.tmp");
    {
        let mut w = csv::Writer::from_path(&tmp)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| CliError::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// `t,value` series.
pub fn write_series(path: &Path, values: &[f64]) -> Result<()> {
    write_csv(
        path,
        &["t", "value"],
        values.iter().enumerate().map(|(t, v)| vec![t.to_string(), num(*v)]),
    )
}

/// `key,value` record.
pub fn write_record(path: &Path, entries: &[(String, String)]) -> Result<()> {
    write_csv(
        path,
        &["key", "value"],
        entries.iter().map(|(k, v)| vec![k.clone(), v.clone()]),
    )
}

/// Reads one numeric column: the named one, else `value`, else the last.
pub fn read_column(path: &Path, column: Option<&str>) -> Result<Vec<f64>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Config(format!("{}: {other:?}", path.display())),
    })?;
    let headers = reader.headers()?.clone();
    let index = match column {
        Some(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Config(format!("{}: no column `{name}`", path.display())))?,
        None => headers
            .iter()
            .position(|h| h == "value")
            .unwrap_or(headers.len().saturating_sub(1)),
    };
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = record.get(index).unwrap_or("").trim();
        let x: f64 = field.parse().map_err(|_| {
            CliError::Config(format!(
                "{}: row {}: `{field}` is not a number",
                path.display(),
                line + 1
            ))
        })?;
        values.push(x);
    }
    Ok(values)
}
