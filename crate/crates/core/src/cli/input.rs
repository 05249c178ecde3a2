//! Sample files and list-valued flags.

use std::fs::File;
use std::path::Path;

use super::CliError;

/// One number per row, UTF-8, with an optional non-numeric header.
pub fn read_column(path: &Path) -> Result<Vec<f64>, CliError> {
    let file = File::open(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    read_column_from(file, &path.display().to_string())
}

pub fn read_column_from(reader: impl std::io::Read, name: &str) -> Result<Vec<f64>, CliError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let mut values = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => CliError::Io {
                path: name.into(),
                source: std::io::Error::other(e.to_string()),
            },
            _ => CliError::Usage(format!("{name}: row {row}: {e}")),
        })?;
        let fields: Vec<&str> = record.iter().filter(|f| !f.is_empty()).collect();
        match fields.as_slice() {
            [] => continue,
            [field] => match field.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                Ok(_) => return Err(CliError::Usage(format!("{name}: row {row}: value {field:?} is not finite"))),
                Err(_) if row == 1 => continue,
                Err(_) => return Err(CliError::Usage(format!("{name}: row {row}: {field:?} is not a number"))),
            },
            _ => {
                return Err(CliError::Usage(format!(
                    "{name}: row {row}: expected one value, found {}",
                    fields.len()
                )))
            }
        }
    }
    Ok(values)
}

/// A finite number or `inf`.
pub fn parse_upper(s: &str) -> Result<Option<f64>, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => Ok(None),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Some)
            .ok_or_else(|| CliError::Usage(format!("expected a number or inf, got {s:?}"))),
    }
}

/// Comma-separated numbers, as in `--marginal 2,1,0.25`.
pub fn parse_tuple(s: &str, len: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let parts: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match parts {
        Ok(v) if v.len() == len => Ok(v),
        _ => Err(CliError::Usage(format!("{what} expects {len} comma-separated numbers, got {s:?}"))),
    }
}
