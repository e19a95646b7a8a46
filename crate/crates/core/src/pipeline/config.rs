use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::{SplitMode, CANONICAL_TARGET};
use crate::elastic_net::{log_grid, ElasticNetConfig};
use crate::error::{Error, Result};
use crate::random_forest::ForestConfig;
use crate::recurrent::TrainConfig;

/// Scale on which forecast errors are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricScale {
    /// z-scored with the training-set scaler (the scale the models fit on).
    #[default]
    Standardized,
    /// Original target units.
    Original,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub points: usize,
    /// Explicit grid; overrides the log-spaced range when present.
    pub grid: Option<Vec<f64>>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            lambda_min: 1e-4,
            lambda_max: 10.0,
            points: 50,
            grid: None,
        }
    }
}

impl SweepConfig {
    pub fn values(&self) -> Vec<f64> {
        match &self.grid {
            Some(g) => g.clone(),
            None => log_grid(self.lambda_min, self.lambda_max, self.points),
        }
    }
}

/// Everything a pipeline command needs. Field names are frozen; see
/// `docs/schemas.md`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: PathBuf,
    pub target: String,
    pub train_fraction: f64,
    pub split_mode: SplitMode,
    /// Master seed. The split uses it directly; the LSTM and forest use
    /// streams 1 and 2 derived from it.
    pub seed: u64,
    /// Observation count behind t and p in the variable report; `null` uses
    /// the row count.
    pub effective_n_for_t: Option<usize>,
    pub orientation_flip: bool,
    pub metric_scale: MetricScale,
    /// Trailing share of the training rows held out for the penalty sweep.
    pub validation_fraction: f64,
    pub sweep: SweepConfig,
    pub elastic_net: ElasticNetConfig,
    pub lstm: TrainConfig,
    pub forest: ForestConfig,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: PathBuf::from("crates/core/data/cjd_synthetic.csv"),
            target: CANONICAL_TARGET.to_string(),
            train_fraction: 0.7,
            split_mode: SplitMode::Chronological,
            seed: 42,
            effective_n_for_t: Some(36),
            orientation_flip: true,
            metric_scale: MetricScale::Standardized,
            validation_fraction: 0.2,
            sweep: SweepConfig::default(),
            elastic_net: ElasticNetConfig::default(),
            lstm: TrainConfig::default(),
            forest: ForestConfig::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!("train_fraction {} outside (0, 1)", self.train_fraction)));
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return Err(Error::Config(format!(
                "validation_fraction {} outside (0, 1)",
                self.validation_fraction
            )));
        }
        if self.target.is_empty() {
            return Err(Error::Config("target must be named".into()));
        }
        if self.effective_n_for_t.is_some_and(|n| n < 3) {
            return Err(Error::Config("effective_n_for_t must be at least 3".into()));
        }
        let grid = self.sweep.values();
        if grid.is_empty() {
            return Err(Error::Config("penalty grid is empty".into()));
        }
        if self.sweep.grid.is_none() && !(self.sweep.lambda_min > 0.0 && self.sweep.lambda_max >= self.sweep.lambda_min) {
            return Err(Error::Config("log grid needs 0 < lambda_min <= lambda_max".into()));
        }
        self.elastic_net.validate()?;
        self.lstm.validate()?;
        if self.forest.n_trees == 0 || self.forest.min_samples_leaf == 0 {
            return Err(Error::Config("forest needs n_trees >= 1 and min_samples_leaf >= 1".into()));
        }
        Ok(())
    }

    /// SHA-256 of the config's JSON serialization, hex encoded. The output
    /// directory is left out so that reruns elsewhere hash the same.
    pub fn hash(&self) -> String {
        let keyed = RunConfig {
            output_dir: PathBuf::new(),
            ..self.clone()
        };
        let json = serde_json::to_string(&keyed).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
