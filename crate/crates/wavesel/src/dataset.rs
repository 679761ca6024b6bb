//! CSV ingestion: comma separated, header row required, `.` decimal separator.
//!
//! A row whose response or any selected predictor is missing (empty, `NA`,
//! `NaN`, `null`) is dropped and counted. Any other unparseable value is an error.

use std::io::Read;
use std::path::Path;

use wavesel_core::nalgebra::DMatrix;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub y_name: String,
    pub x_names: Vec<String>,
    pub y: Vec<f64>,
    /// One vector per predictor column.
    pub x: Vec<Vec<f64>>,
    pub rows_read: usize,
    pub rows_dropped: usize,
    /// 1-based data row numbers of the kept rows, in file order.
    pub kept_rows: Vec<usize>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Intercept column followed by the predictors.
    pub fn design(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.len(), self.x.len() + 1, |i, j| if j == 0 { 1.0 } else { self.x[j - 1][i] })
    }
}

fn is_missing(field: &str) -> bool {
    matches!(field.trim().to_ascii_lowercase().as_str(), "" | "na" | "nan" | "null")
}

pub fn read_csv(path: &Path, y_name: &str, x_names: &[String]) -> CliResult<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_csv(file, y_name, x_names).map_err(|e| match e {
        CliError::Input(message) => CliError::Csv { path: path.into(), message },
        other => other,
    })
}

pub fn parse_csv<R: Read>(reader: R, y_name: &str, x_names: &[String]) -> CliResult<Dataset> {
    if x_names.is_empty() {
        return Err(CliError::Input("at least one predictor column is required".into()));
    }
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let columns: Vec<String> =
        rdr.headers().map_err(|e| CliError::Input(e.to_string()))?.iter().map(str::to_owned).collect();
    let find = |name: &str| {
        columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| CliError::Input(format!("column {name:?} not found; header is {columns:?}")))
    };
    let y_col = find(y_name)?;
    let x_cols = x_names.iter().map(|n| find(n)).collect::<CliResult<Vec<_>>>()?;

    let mut y = Vec::new();
    let mut x = vec![Vec::new(); x_cols.len()];
    let mut kept_rows = Vec::new();
    let mut rows_read = 0;
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| CliError::Input(e.to_string()))?;
        rows_read += 1;
        let mut values = Vec::with_capacity(x_cols.len() + 1);
        let mut missing = false;
        for &col in std::iter::once(&y_col).chain(&x_cols) {
            let field = record.get(col).unwrap_or("");
            if is_missing(field) {
                missing = true;
                break;
            }
            let v: f64 = field.trim().parse().map_err(|_| {
                CliError::Input(format!("row {}: column {:?} holds non-numeric value {field:?}", row + 1, columns[col]))
            })?;
            if !v.is_finite() {
                missing = true;
                break;
            }
            values.push(v);
        }
        if missing {
            continue;
        }
        y.push(values[0]);
        for (dst, v) in x.iter_mut().zip(&values[1..]) {
            dst.push(*v);
        }
        kept_rows.push(row + 1);
    }
    Ok(Dataset {
        columns,
        y_name: y_name.into(),
        x_names: x_names.to_vec(),
        rows_dropped: rows_read - y.len(),
        y,
        x,
        rows_read,
        kept_rows,
    })
}
