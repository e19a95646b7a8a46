use serde::{Deserialize, Serialize};

use super::TimeSeriesTable;
use crate::error::DatasetError;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitMode {
    /// Earliest rows train, latest rows test.
    #[default]
    Chronological,
    /// Rows permuted with `Rng::new(seed)` (Fisher-Yates), then split; each
    /// part is re-sorted by year.
    SeededRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    #[serde(default)]
    pub mode: SplitMode,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.7,
            mode: SplitMode::Chronological,
            seed: 42,
        }
    }
}

/// floor(n · fraction), after checking that it leaves at least two train
/// rows and one test row.
pub fn train_size(n: usize, train_fraction: f64) -> Result<usize, DatasetError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DatasetError::TooFewRows(format!(
            "train fraction {train_fraction} outside (0, 1)"
        )));
    }
    let k = (n as f64 * train_fraction).floor() as usize;
    if k < 2 || n - k < 1 {
        return Err(DatasetError::TooFewRows(format!(
            "{n} rows at fraction {train_fraction} give {k} train and {} test rows",
            n.saturating_sub(k)
        )));
    }
    Ok(k)
}

pub fn split(
    table: &TimeSeriesTable,
    spec: &SplitSpec,
) -> Result<(TimeSeriesTable, TimeSeriesTable), DatasetError> {
    let n = table.n_rows();
    let k = train_size(n, spec.train_fraction)?;
    let mut order: Vec<usize> = (0..n).collect();
    if spec.mode == SplitMode::SeededRandom {
        Rng::new(spec.seed).shuffle(&mut order);
    }
    let mut train_idx = order[..k].to_vec();
    let mut test_idx = order[k..].to_vec();
    // Rows are year-sorted, so sorting indices sorts by year.
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((table.select_rows(&train_idx)?, table.select_rows(&test_idx)?))
}
