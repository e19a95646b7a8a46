//! Yearly-indexed tables: loading, validation, standard scaling and splitting.
//!
//! CSV dialect: comma separated, `.` decimal point, no thousands separators,
//! UTF-8, LF or CRLF line endings. The first column must be named `year` and
//! hold integer calendar years in strictly increasing order; every other cell
//! must parse as a finite real number.

mod scaler;
mod split;
pub mod synthetic;

pub use scaler::{fit_scaler, inverse_transform, transform, ScalerParams};
pub use split::{split, train_size, SplitMode, SplitSpec};

use std::collections::HashSet;
use std::path::Path;

use crate::error::DatasetError;
use crate::linalg::Matrix;

/// Canonical predictor columns, in report order.
pub const CANONICAL_PREDICTORS: [&str; 9] = [
    "beef_production",
    "co2_levels",
    "nitrogen_usage",
    "potash_k2o_usage",
    "pesticide_usage",
    "beer_consumption",
    "obesity_levels",
    "smoking_levels",
    "smoking_less_than_1_pack",
];

pub const CANONICAL_TARGET: &str = "cjd_cases";

/// A yearly table: one row per year, one named real-valued column per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesTable {
    years: Vec<i64>,
    columns: Vec<String>,
    values: Matrix,
}

impl TimeSeriesTable {
    /// Validates every table invariant.
    pub fn new(years: Vec<i64>, columns: Vec<String>, values: Matrix) -> Result<Self, DatasetError> {
        if values.rows() != years.len() {
            return Err(DatasetError::InvalidTable(format!(
                "{} value rows for {} years",
                values.rows(),
                years.len()
            )));
        }
        if values.cols() != columns.len() {
            return Err(DatasetError::InvalidTable(format!(
                "{} value columns for {} names",
                values.cols(),
                columns.len()
            )));
        }
        let mut seen = HashSet::new();
        for c in &columns {
            if c.is_empty() {
                return Err(DatasetError::MalformedHeader("empty column name".into()));
            }
            if !seen.insert(c.as_str()) {
                return Err(DatasetError::MalformedHeader(format!("duplicate column {c:?}")));
            }
        }
        check_years(&years)?;
        if let Some(pos) = values.as_slice().iter().position(|v| !v.is_finite()) {
            let (i, j) = (pos / columns.len(), pos % columns.len());
            return Err(DatasetError::NonNumericCell {
                row: i + 1,
                col: columns[j].clone(),
                value: values[(i, j)].to_string(),
            });
        }
        Ok(Self {
            years,
            columns,
            values,
        })
    }

    pub fn years(&self) -> &[i64] {
        &self.years
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn n_rows(&self) -> usize {
        self.years.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column_index(&self, name: &str) -> Result<usize, DatasetError> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| DatasetError::UnknownColumn(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>, DatasetError> {
        Ok(self.values.column(self.column_index(name)?))
    }

    /// Design matrix of the named columns, in the given order.
    pub fn matrix_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Matrix, DatasetError> {
        let idx = names
            .iter()
            .map(|n| self.column_index(n.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.values.select_columns(&idx))
    }

    /// All column names except `target`, in table order.
    pub fn predictors_except(&self, target: &str) -> Result<Vec<String>, DatasetError> {
        self.column_index(target)?;
        Ok(self.columns.iter().filter(|c| *c != target).cloned().collect())
    }

    /// Sub-table of the given rows. Indices must be increasing.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self, DatasetError> {
        let years = indices.iter().map(|&i| self.years[i]).collect();
        Self::new(years, self.columns.clone(), self.values.select_rows(indices))
    }

    pub(crate) fn with_values(&self, values: Matrix) -> Self {
        debug_assert_eq!(values.rows(), self.n_rows());
        debug_assert_eq!(values.cols(), self.n_cols());
        Self {
            years: self.years.clone(),
            columns: self.columns.clone(),
            values,
        }
    }

    /// Serializes as CSV with a `year` first column. Values use the shortest
    /// representation that round-trips.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("year");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (i, y) in self.years.iter().enumerate() {
            out.push_str(&y.to_string());
            for v in self.values.row(i) {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

fn check_years(years: &[i64]) -> Result<(), DatasetError> {
    for w in years.windows(2) {
        if w[1] == w[0] {
            return Err(DatasetError::DuplicateYear(w[0]));
        }
        if w[1] < w[0] {
            return Err(DatasetError::NonMonotonicYears {
                previous: w[0],
                next: w[1],
            });
        }
    }
    Ok(())
}

/// Loads and validates a CSV file.
pub fn load_csv(path: impl AsRef<Path>) -> Result<TimeSeriesTable, DatasetError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => DatasetError::MissingFile(path.display().to_string()),
        _ => DatasetError::Io(format!("{}: {e}", path.display())),
    })?;
    parse_csv(&text)
}

/// Parses CSV text (see the module docs for the dialect).
pub fn parse_csv(text: &str) -> Result<TimeSeriesTable, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let header = reader
        .headers()
        .map_err(|e| DatasetError::MalformedHeader(e.to_string()))?
        .clone();
    let names: Vec<String> = header.iter().map(str::to_string).collect();
    if names.len() < 2 || names.iter().all(String::is_empty) {
        return Err(DatasetError::MalformedHeader(
            "need a year column and at least one value column".into(),
        ));
    }
    if names[0] != "year" {
        return Err(DatasetError::MalformedHeader(format!(
            "first column must be \"year\", found {:?}",
            names[0]
        )));
    }
    let columns = names[1..].to_vec();

    let mut years = Vec::new();
    let mut data = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let row = k + 1;
        let record = record.map_err(|e| DatasetError::Io(e.to_string()))?;
        if record.len() != names.len() {
            return Err(DatasetError::RaggedRow {
                row,
                found: record.len(),
                expected: names.len(),
            });
        }
        let year_cell = &record[0];
        let year: i64 = year_cell.parse().map_err(|_| DatasetError::NonNumericCell {
            row,
            col: "year".into(),
            value: year_cell.to_string(),
        })?;
        years.push(year);
        for (j, cell) in record.iter().enumerate().skip(1) {
            let v = parse_number(cell).ok_or_else(|| DatasetError::NonNumericCell {
                row,
                col: names[j].clone(),
                value: cell.to_string(),
            })?;
            data.push(v);
        }
    }
    let values = Matrix::from_row_major(years.len(), columns.len(), data);
    TimeSeriesTable::new(years, columns, values)
}

// Rust's float parser also accepts "inf", "NaN" and friends; only finite
// values are data.
fn parse_number(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}
