//! Observation-file reading.
//!
//! Plain format: one real per line. CSV format (selected by a 1-based
//! column index): the chosen field of each line. Blank lines and lines
//! starting with `#` are skipped in both formats; anything else that does
//! not parse as a number is an error naming the line.

use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    Plain,
    Csv { column: usize },
}

#[derive(Debug, Clone)]
pub struct DataFile {
    pub path: PathBuf,
    pub values: Vec<f64>,
    pub format: SourceFormat,
}

/// Read observations from `path`; `column` switches to CSV mode.
pub fn read_data(path: &Path, column: Option<usize>) -> Result<DataFile, String> {
    let format = match column {
        Some(0) => return Err("--column is 1-based; 0 is not a valid column".to_string()),
        Some(k) => SourceFormat::Csv { column: k },
        None => SourceFormat::Plain,
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let values = parse_text(&text, format, &path.display().to_string())?;
    Ok(DataFile {
        path: path.to_path_buf(),
        values,
        format,
    })
}

pub fn parse_text(text: &str, format: SourceFormat, origin: &str) -> Result<Vec<f64>, String> {
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let token = match format {
            SourceFormat::Plain => line,
            SourceFormat::Csv { column } => line.split(',').nth(column - 1).ok_or_else(|| {
                format!("{origin}:{}: line has no column {column}: '{raw}'", idx + 1)
            })?,
        };
        let token = token.trim();
        let value: f64 = token
            .parse()
            .map_err(|_| format!("{origin}:{}: expected a number, found '{token}'", idx + 1))?;
        if !value.is_finite() {
            return Err(format!("{origin}:{}: non-finite value '{token}'", idx + 1));
        }
        values.push(value);
    }
    Ok(values)
}
