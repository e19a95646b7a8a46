use serde::{Deserialize, Serialize};

use super::TimeSeriesTable;
use crate::error::DatasetError;
use crate::linalg::{mean, population_variance};

/// Per-column z-scoring parameters. `std` is the population standard
/// deviation (divisor n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub columns: Vec<String>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ScalerParams {
    fn position(&self, name: &str) -> Result<usize, DatasetError> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| DatasetError::UnknownColumn(name.to_string()))
    }

    pub fn scale_value(&self, column: &str, x: f64) -> Result<f64, DatasetError> {
        let k = self.position(column)?;
        Ok((x - self.mean[k]) / self.std[k])
    }

    pub fn unscale_value(&self, column: &str, z: f64) -> Result<f64, DatasetError> {
        let k = self.position(column)?;
        Ok(z * self.std[k] + self.mean[k])
    }
}

pub fn fit_scaler<S: AsRef<str>>(
    table: &TimeSeriesTable,
    columns: &[S],
) -> Result<ScalerParams, DatasetError> {
    let mut params = ScalerParams {
        columns: Vec::with_capacity(columns.len()),
        mean: Vec::with_capacity(columns.len()),
        std: Vec::with_capacity(columns.len()),
    };
    for name in columns {
        let name = name.as_ref();
        let values = table.column(name)?;
        let first = values.first().copied();
        if values.iter().all(|v| Some(*v) == first) {
            return Err(DatasetError::ConstantColumn(name.to_string()));
        }
        let std = population_variance(&values).sqrt();
        if !(std > 0.0) {
            return Err(DatasetError::ConstantColumn(name.to_string()));
        }
        params.columns.push(name.to_string());
        params.mean.push(mean(&values));
        params.std.push(std);
    }
    Ok(params)
}

/// z = (x - mean) / std on every parameterized column; other columns pass
/// through untouched.
pub fn transform(table: &TimeSeriesTable, params: &ScalerParams) -> Result<TimeSeriesTable, DatasetError> {
    map_columns(table, params, |x, m, s| (x - m) / s)
}

pub fn inverse_transform(
    table: &TimeSeriesTable,
    params: &ScalerParams,
) -> Result<TimeSeriesTable, DatasetError> {
    map_columns(table, params, |z, m, s| z * s + m)
}

fn map_columns(
    table: &TimeSeriesTable,
    params: &ScalerParams,
    f: impl Fn(f64, f64, f64) -> f64,
) -> Result<TimeSeriesTable, DatasetError> {
    let idx = params
        .columns
        .iter()
        .map(|c| table.column_index(c))
        .collect::<Result<Vec<_>, _>>()?;
    let mut values = table.values().clone();
    for i in 0..values.rows() {
        for (k, &j) in idx.iter().enumerate() {
            values[(i, j)] = f(values[(i, j)], params.mean[k], params.std[k]);
        }
    }
    Ok(table.with_values(values))
}
