//! Serialized report shapes. Values are held at full precision and rounded
//! only when written: three decimals for metrics, coefficients and the
//! correlation statistics, four significant digits for p-values.

use serde::{Deserialize, Serialize, Serializer};

use super::config::MetricScale;
use crate::metrics::MetricReport;
use crate::stats::{Marker, VariableStats};

pub fn round3(v: f64) -> f64 {
    let r = (v * 1000.0).round() / 1000.0;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn round_sig4(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.3e}").parse().expect("formatted float parses")
}

fn ser_round3<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round3(*v))
}

fn ser_sig4<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig4(*v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "RF")]
    RandomForest,
    #[serde(rename = "LSTM")]
    Lstm,
    #[serde(rename = "ENR")]
    ElasticNet,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::RandomForest, ModelKind::Lstm, ModelKind::ElasticNet];

    pub fn label(self) -> &'static str {
        match self {
            ModelKind::RandomForest => "RF",
            ModelKind::Lstm => "LSTM",
            ModelKind::ElasticNet => "ENR",
        }
    }

    pub fn file_stem(self) -> &'static str {
        match self {
            ModelKind::RandomForest => "rf",
            ModelKind::Lstm => "lstm",
            ModelKind::ElasticNet => "enr",
        }
    }
}

/// One row of the model comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelMetrics {
    pub model: ModelKind,
    #[serde(serialize_with = "ser_round3")]
    pub rmse: f64,
    #[serde(serialize_with = "ser_round3")]
    pub mbe: f64,
    #[serde(serialize_with = "ser_round3")]
    pub mae: f64,
    pub n: usize,
    pub significant_rmse: bool,
    pub significant_mbe: bool,
    pub significant_mae: bool,
}

impl ModelMetrics {
    pub fn new(model: ModelKind, m: &MetricReport) -> Self {
        Self {
            model,
            rmse: m.rmse,
            mbe: m.mbe,
            mae: m.mae,
            n: m.n,
            significant_rmse: m.significant_rmse,
            significant_mbe: m.significant_mbe,
            significant_mae: m.significant_mae,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub variable: String,
    #[serde(serialize_with = "ser_round3")]
    pub coefficient: f64,
}

/// One row of the variable/target relationship table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariableRow {
    pub variable: String,
    #[serde(serialize_with = "ser_round3")]
    pub r: f64,
    #[serde(serialize_with = "ser_round3")]
    pub r_squared: f64,
    #[serde(serialize_with = "ser_round3")]
    pub t_statistic: f64,
    #[serde(serialize_with = "ser_round3")]
    pub cronbach_alpha: f64,
    #[serde(serialize_with = "ser_sig4")]
    pub p_value: f64,
    pub markers: Vec<Marker>,
}

impl From<&VariableStats> for VariableRow {
    fn from(s: &VariableStats) -> Self {
        Self {
            variable: s.variable.clone(),
            r: s.r,
            r_squared: s.r_squared,
            t_statistic: s.t_statistic,
            cronbach_alpha: s.cronbach_alpha,
            p_value: s.p_value,
            markers: s.markers.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitSummary {
    pub mode: crate::dataset::SplitMode,
    pub n_train: usize,
    pub n_test: usize,
    pub train_years: Vec<i64>,
    pub test_years: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub config_hash: String,
    pub crate_version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub metric_scale: MetricScale,
    /// RF, LSTM, ENR in that order.
    pub models: Vec<ModelMetrics>,
    /// One per predictor, dataset column order.
    pub enr_coefficients: Vec<Coefficient>,
    #[serde(serialize_with = "ser_round3")]
    pub enr_intercept: f64,
    pub best_lambda: f64,
    pub l1_ratio: f64,
    pub penalty_interpretation: String,
    pub variable_stats: Vec<VariableRow>,
    pub effective_n_for_t: usize,
    pub split: SplitSummary,
    pub provenance: Provenance,
}

impl EvaluationReport {
    pub fn metrics_for(&self, kind: ModelKind) -> Option<&ModelMetrics> {
        self.models.iter().find(|m| m.model == kind)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub const PENALTY_INTERPRETATION: &str =
    "best_lambda is the overall penalty strength (chosen by the validation sweep); \
     l1_ratio is the L1 share of the penalty";
