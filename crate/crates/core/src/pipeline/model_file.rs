//! Saved models: the fitted parameters plus everything needed to apply them
//! to a raw dataset (feature order, target name, training scaler).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{ScalerParams, TimeSeriesTable};
use crate::elastic_net::{self, LinearModel};
use crate::error::{Error, Result};
use crate::random_forest::{self, Forest};
use crate::recurrent::{lstm_forward, LstmParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model")]
pub enum Fitted {
    #[serde(rename = "ENR")]
    ElasticNet { linear: LinearModel },
    #[serde(rename = "LSTM")]
    Lstm { window_length: usize, params: LstmParams },
    #[serde(rename = "RF")]
    RandomForest { forest: Forest },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SavedModel {
    pub features: Vec<String>,
    pub target: String,
    /// Fitted on the training rows; covers every feature and the target.
    pub scaler: ScalerParams,
    pub fitted: Fitted,
}

/// One forecast in original target units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub year: i64,
    pub forecast: f64,
}

impl SavedModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: SavedModel = serde_json::from_str(text).map_err(|e| Error::CorruptModel(e.to_string()))?;
        m.check()?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    fn check(&self) -> Result<()> {
        let corrupt = |m: String| Err(Error::CorruptModel(m));
        if self.features.is_empty() {
            return corrupt("no features".into());
        }
        let s = &self.scaler;
        if s.mean.len() != s.columns.len() || s.std.len() != s.columns.len() {
            return corrupt("scaler vectors differ in length".into());
        }
        if s.mean.iter().chain(&s.std).any(|v| !v.is_finite()) || s.std.iter().any(|v| *v <= 0.0) {
            return corrupt("scaler has non-finite or non-positive entries".into());
        }
        for c in self.features.iter().chain(std::iter::once(&self.target)) {
            if !s.columns.contains(c) {
                return corrupt(format!("scaler lacks column {c}"));
            }
        }
        let p = self.features.len();
        match &self.fitted {
            Fitted::ElasticNet { linear } => {
                if linear.coefficients.len() != p {
                    return corrupt(format!("{} coefficients for {p} features", linear.coefficients.len()));
                }
                if !linear.intercept.is_finite() || linear.coefficients.iter().any(|b| !b.is_finite()) {
                    return corrupt("non-finite coefficients".into());
                }
            }
            Fitted::Lstm { window_length, params } => {
                if *window_length == 0 {
                    return corrupt("window_length is zero".into());
                }
                if params.input_size != p {
                    return corrupt(format!("network takes {} inputs for {p} features", params.input_size));
                }
            }
            Fitted::RandomForest { forest } => {
                if forest.n_features != p {
                    return corrupt(format!("forest takes {} features for {p} features", forest.n_features));
                }
                forest.validate().map_err(Error::CorruptModel)?;
            }
        }
        Ok(())
    }

    /// Forecasts for `table`, which must carry every saved feature column.
    /// The LSTM forecasts only rows with a full window of history.
    pub fn predict(&self, table: &TimeSeriesTable) -> Result<Vec<Prediction>> {
        let missing: Vec<&str> = self
            .features
            .iter()
            .filter(|f| table.column_index(f).is_err())
            .map(String::as_str)
            .collect();
        if !missing.is_empty() {
            return Err(Error::SchemaMismatch(format!("dataset lacks {}", missing.join(", "))));
        }
        let x = self.standardized_features(table)?;
        let years = table.years();
        let z: Vec<(i64, f64)> = match &self.fitted {
            Fitted::ElasticNet { linear } => years.iter().copied().zip(elastic_net::predict(linear, &x)?).collect(),
            Fitted::RandomForest { forest } => {
                years.iter().copied().zip(random_forest::predict_rows(forest, &x)?).collect()
            }
            Fitted::Lstm { window_length, params } => {
                let l = *window_length;
                let mut out = Vec::new();
                for (end, year) in years.iter().enumerate().skip(l.saturating_sub(1)) {
                    let idx: Vec<usize> = (end + 1 - l..=end).collect();
                    out.push((*year, lstm_forward(params, &x.select_rows(&idx))?.prediction));
                }
                out
            }
        };
        z.into_iter()
            .map(|(year, v)| {
                Ok(Prediction {
                    year,
                    forecast: self.scaler.unscale_value(&self.target, v)?,
                })
            })
            .collect()
    }

    fn standardized_features(&self, table: &TimeSeriesTable) -> Result<crate::Matrix> {
        let mut x = table.matrix_of(&self.features)?;
        for (j, f) in self.features.iter().enumerate() {
            for i in 0..x.rows() {
                x[(i, j)] = self.scaler.scale_value(f, x[(i, j)])?;
            }
        }
        Ok(x)
    }
}

pub fn predictions_csv(predictions: &[Prediction]) -> String {
    let mut s = String::from("year,forecast\n");
    for p in predictions {
        s.push_str(&format!("{},{}\n", p.year, p.forecast));
    }
    s
}
