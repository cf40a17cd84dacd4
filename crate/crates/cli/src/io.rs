//! Path ingestion: JSON batch files and single-path CSV files.

use std::fs;
use std::path::Path;

use polysig::PiecewiseLinearPath;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// On-disk batch of paths sharing one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchFile {
    pub dim: usize,
    pub paths: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<Vec<f64>>>,
}

impl BatchFile {
    pub fn from_paths(paths: &[PiecewiseLinearPath]) -> CliResult<Self> {
        let dim = paths.first().ok_or_else(|| CliError::input("empty batch"))?.dim();
        Ok(Self {
            dim,
            paths: paths.iter().map(|p| p.rows().map(<[f64]>::to_vec).collect()).collect(),
            times: Some(paths.iter().map(|p| p.times().to_vec()).collect()),
        })
    }

    pub fn into_paths(self) -> CliResult<Vec<PiecewiseLinearPath>> {
        if self.paths.is_empty() {
            return Err(CliError::input("batch file contains no paths"));
        }
        if let Some(times) = &self.times {
            if times.len() != self.paths.len() {
                return Err(CliError::input(format!(
                    "{} time arrays for {} paths",
                    times.len(),
                    self.paths.len()
                )));
            }
        }
        let mut times = self.times.map(|t| t.into_iter());
        self.paths
            .into_iter()
            .enumerate()
            .map(|(k, rows)| {
                if let Some(bad) = rows.iter().position(|r| r.len() != self.dim) {
                    return Err(CliError::input(format!(
                        "path {k}, row {bad}: expected {} values, found {}",
                        self.dim,
                        rows[bad].len()
                    )));
                }
                let t = times.as_mut().and_then(Iterator::next);
                PiecewiseLinearPath::from_rows(t, &rows)
                    .map_err(|e| CliError::input(format!("path {k}: {e}")))
            })
            .collect()
    }
}

pub fn read_batch_json(file: &Path) -> CliResult<Vec<PiecewiseLinearPath>> {
    let text = fs::read_to_string(file)
        .map_err(|e| CliError::input(format!("{}: {e}", file.display())))?;
    let batch: BatchFile = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", file.display())))?;
    batch.into_paths()
}

pub fn write_batch_json(file: &Path, paths: &[PiecewiseLinearPath]) -> CliResult<()> {
    let text = serde_json::to_string(&BatchFile::from_paths(paths)?)?;
    fs::write(file, text)?;
    Ok(())
}

/// One path per file: rows are time points, columns are coordinates, and a
/// first column headed `t` holds the time stamps. A header row is optional.
pub fn read_path_csv(file: &Path) -> CliResult<PiecewiseLinearPath> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(file)
        .map_err(|e| CliError::input(format!("{}: {e}", file.display())))?;
    let mut records = reader.records();
    let first = records
        .next()
        .ok_or_else(|| CliError::input(format!("{}: empty file", file.display())))??;
    let numeric = |r: &csv::StringRecord, line: usize| -> CliResult<Vec<f64>> {
        r.iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| {
                    CliError::input(format!("{}: line {line}: not a number: {f:?}", file.display()))
                })
            })
            .collect()
    };
    let (has_time, mut rows) = if first.iter().all(|f| f.parse::<f64>().is_ok()) {
        (false, vec![numeric(&first, 1)?])
    } else {
        (first.get(0) == Some("t"), Vec::new())
    };
    for (k, rec) in records.enumerate() {
        let line = k + 2;
        rows.push(numeric(&rec?, line)?);
    }
    if has_time {
        let times = rows.iter().map(|r| r[0]).collect();
        let values: Vec<Vec<f64>> = rows.into_iter().map(|r| r[1..].to_vec()).collect();
        Ok(PiecewiseLinearPath::from_rows(Some(times), &values)?)
    } else {
        Ok(PiecewiseLinearPath::from_rows(None, &rows)?)
    }
}

/// Reads a `.csv` single path or a JSON batch, by extension.
pub fn read_paths(file: &Path) -> CliResult<Vec<PiecewiseLinearPath>> {
    match file.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => Ok(vec![read_path_csv(file)?]),
        _ => read_batch_json(file),
    }
}

pub fn read_single(file: &Path) -> CliResult<PiecewiseLinearPath> {
    let mut paths = read_paths(file)?;
    if paths.len() != 1 {
        return Err(CliError::input(format!(
            "{}: expected exactly one path, found {}",
            file.display(),
            paths.len()
        )));
    }
    Ok(paths.remove(0))
}
