//! End-to-end commands: variable statistics, the three-model comparison,
//! the penalty sweep and prediction from a saved model.
//!
//! Every command computes all of its outputs in memory before touching the
//! output directory, so a failing run leaves nothing behind. Each file is
//! written to a temporary name and renamed into place; `report.json` goes
//! last.

mod config;
mod model_file;
mod report;

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub use config::{MetricScale, RunConfig, SweepConfig};
pub use model_file::{predictions_csv, Fitted, Prediction, SavedModel};
pub use report::{
    round3, round_sig4, Coefficient, EvaluationReport, ModelKind, ModelMetrics, Provenance, SplitSummary,
    VariableRow, PENALTY_INTERPRETATION,
};

use crate::dataset::{self, fit_scaler, split, train_size, transform, ScalerParams, SplitSpec, TimeSeriesTable};
use crate::elastic_net::{self, SweepResult};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::metrics;
use crate::random_forest;
use crate::recurrent::{self, LstmParams};
use crate::rng::derive_stream_seed;
use crate::stats::{self, CorrelationMatrix, ReportOptions, VariableStats};

/// Stream indices derived from the master seed.
pub const LSTM_STREAM: u64 = 1;
pub const FOREST_STREAM: u64 = 2;

fn now_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn load_dataset(config: &RunConfig) -> Result<TimeSeriesTable> {
    config.validate()?;
    let table = dataset::load_csv(&config.dataset)?;
    table.predictors_except(&config.target)?;
    Ok(table)
}

// ---------------------------------------------------------------- stats

#[derive(Debug, Clone, PartialEq)]
pub struct StatsOutput {
    pub variables: Vec<VariableStats>,
    pub correlations: CorrelationMatrix,
}

pub fn compute_stats(config: &RunConfig) -> Result<StatsOutput> {
    let table = load_dataset(config)?;
    let options = ReportOptions {
        orientation_flip: config.orientation_flip,
        effective_n: config.effective_n_for_t,
    };
    Ok(StatsOutput {
        variables: stats::variable_report(&table, &config.target, options)?,
        correlations: stats::correlation_matrix(&table)?,
    })
}

fn table1_csv(rows: &[VariableStats]) -> String {
    let mut s = String::from("variable,r,r_squared,t_statistic,cronbach_alpha,p_value,markers\n");
    for v in rows {
        let markers: String = v.markers.iter().map(|m| m.symbol()).collect::<Vec<_>>().join(" ");
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            v.variable, v.r, v.r_squared, v.t_statistic, v.cronbach_alpha, v.p_value, markers
        ));
    }
    s
}

fn correlation_csv(c: &CorrelationMatrix) -> String {
    let mut s = String::from("variable");
    for n in &c.names {
        s.push(',');
        s.push_str(n);
    }
    s.push('\n');
    for (i, n) in c.names.iter().enumerate() {
        s.push_str(n);
        for j in 0..c.names.len() {
            s.push_str(&format!(",{}", c.values[(i, j)]));
        }
        s.push('\n');
    }
    s
}

/// Writes `stats.json`, `table1.csv` and `correlation_matrix.csv`.
pub fn cmd_stats(config: &RunConfig) -> Result<StatsOutput> {
    let out = compute_stats(config)?;
    let rows: Vec<VariableRow> = out.variables.iter().map(VariableRow::from).collect();
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "effective_n_for_t": config.effective_n_for_t,
        "variable_stats": rows,
        "correlation_matrix": { "names": out.correlations.names, "values": out.correlations.values },
    }))?;
    let dir = &config.output_dir;
    create_dir(dir)?;
    write_file(&dir.join("table1.csv"), &table1_csv(&out.variables))?;
    write_file(&dir.join("correlation_matrix.csv"), &correlation_csv(&out.correlations))?;
    write_file(&dir.join("stats.json"), &json)?;
    Ok(out)
}

// ---------------------------------------------------------------- shared preparation

/// Raw table split into train and test, with the training-row scaler over
/// every column.
struct Prepared {
    raw: TimeSeriesTable,
    predictors: Vec<String>,
    train_raw: TimeSeriesTable,
    test_raw: TimeSeriesTable,
    scaler: ScalerParams,
}

impl Prepared {
    fn new(config: &RunConfig) -> Result<Self> {
        let raw = load_dataset(config)?;
        let predictors = raw.predictors_except(&config.target)?;
        let spec = SplitSpec {
            train_fraction: config.train_fraction,
            mode: config.split_mode,
            seed: config.seed,
        };
        let (train_raw, test_raw) = split(&raw, &spec)?;
        let scaler = fit_scaler(&train_raw, raw.columns())?;
        Ok(Self {
            raw,
            predictors,
            train_raw,
            test_raw,
            scaler,
        })
    }

    fn xy(&self, table: &TimeSeriesTable, target: &str) -> Result<(Matrix, Vec<f64>)> {
        Ok((table.matrix_of(&self.predictors)?, table.column(target)?))
    }
}

/// Sweeps the penalty on the training rows alone: the last
/// `validation_fraction` of them (in year order) validate, the rest fit.
/// The sub-training rows get their own scaler, so validation rows never
/// influence the standardization.
fn run_sweep(config: &RunConfig, prep: &Prepared) -> Result<SweepResult> {
    let n = prep.train_raw.n_rows();
    let k = train_size(n, 1.0 - config.validation_fraction)?;
    let fit_rows: Vec<usize> = (0..k).collect();
    let val_rows: Vec<usize> = (k..n).collect();
    let sub = prep.train_raw.select_rows(&fit_rows)?;
    let val = prep.train_raw.select_rows(&val_rows)?;
    let sub_scaler = fit_scaler(&sub, sub.columns())?;
    let (x_fit, y_fit) = prep.xy(&transform(&sub, &sub_scaler)?, &config.target)?;
    let (x_val, y_val) = prep.xy(&transform(&val, &sub_scaler)?, &config.target)?;
    elastic_net::sweep(&x_fit, &y_fit, &x_val, &y_val, &config.sweep.values(), &config.elastic_net)
}

pub fn compute_sweep(config: &RunConfig) -> Result<SweepResult> {
    run_sweep(config, &Prepared::new(config)?)
}

/// Writes `sweep_curve.csv` and `sweep.json`.
pub fn cmd_sweep(config: &RunConfig) -> Result<SweepResult> {
    let result = compute_sweep(config)?;
    let dir = &config.output_dir;
    create_dir(dir)?;
    write_file(&dir.join("sweep_curve.csv"), &result.curve_csv())?;
    write_file(&dir.join("sweep.json"), &serde_json::to_string_pretty(&result)?)?;
    Ok(result)
}

// ---------------------------------------------------------------- run

/// Test-row forecasts for one model on the metric scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelForecasts {
    pub model: ModelKind,
    pub years: Vec<i64>,
    pub actual: Vec<f64>,
    pub forecast: Vec<f64>,
}

impl ModelForecasts {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("year,actual,forecast\n");
        for ((y, a), f) in self.years.iter().zip(&self.actual).zip(&self.forecast) {
            s.push_str(&format!("{y},{a},{f}\n"));
        }
        s
    }
}

/// Everything `run` computes, held at full precision.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub report: EvaluationReport,
    /// RF, LSTM, ENR.
    pub forecasts: Vec<ModelForecasts>,
    pub sweep: SweepResult,
    pub lstm_loss: Vec<f64>,
    pub enr: SavedModel,
    pub lstm: SavedModel,
    pub rf: SavedModel,
}

impl RunArtifacts {
    pub fn model(&self, kind: ModelKind) -> &SavedModel {
        match kind {
            ModelKind::ElasticNet => &self.enr,
            ModelKind::Lstm => &self.lstm,
            ModelKind::RandomForest => &self.rf,
        }
    }

    pub fn forecasts_for(&self, kind: ModelKind) -> &ModelForecasts {
        self.forecasts.iter().find(|f| f.model == kind).expect("all three models present")
    }
}

/// Fits and evaluates all three models. The ENR penalty is the sweep's
/// optimum; the network and forest seeds are streams derived from the
/// master seed, overriding the per-model `seed` fields.
pub fn compute_run(config: &RunConfig) -> Result<RunArtifacts> {
    let started = now_unix();
    let prep = Prepared::new(config)?;
    let target = config.target.as_str();

    let train_z = transform(&prep.train_raw, &prep.scaler)?;
    let test_z = transform(&prep.test_raw, &prep.scaler)?;
    let (x_train, y_train) = prep.xy(&train_z, target)?;
    let (x_test, y_test) = prep.xy(&test_z, target)?;

    let sweep = run_sweep(config, &prep)?;
    let enr_config = config.elastic_net.with_lambda(sweep.best_lambda);
    let linear = elastic_net::fit(&x_train, &y_train, &enr_config)?;
    let enr_test = elastic_net::predict(&linear, &x_test)?;

    let forest_config = random_forest::ForestConfig {
        seed: derive_stream_seed(config.seed, FOREST_STREAM),
        ..config.forest
    };
    let forest = random_forest::fit_forest(&x_train, &y_train, &forest_config)?;
    let rf_test = random_forest::predict_rows(&forest, &x_test)?;

    let lstm_config = recurrent::TrainConfig {
        seed: derive_stream_seed(config.seed, LSTM_STREAM),
        ..config.lstm
    };
    let (lstm_params, lstm_loss, lstm_eval) = fit_lstm(&prep, &lstm_config, target)?;

    let test_years = prep.test_raw.years().to_vec();
    let to_metric = |z: &[f64]| -> Result<Vec<f64>> {
        match config.metric_scale {
            MetricScale::Standardized => Ok(z.to_vec()),
            MetricScale::Original => z.iter().map(|v| Ok(prep.scaler.unscale_value(target, *v)?)).collect(),
        }
    };
    let mut forecasts = Vec::with_capacity(3);
    for kind in ModelKind::ALL {
        let (years, actual_z, forecast_z) = match kind {
            ModelKind::RandomForest => (test_years.clone(), y_test.clone(), rf_test.clone()),
            ModelKind::ElasticNet => (test_years.clone(), y_test.clone(), enr_test.clone()),
            ModelKind::Lstm => lstm_eval.clone(),
        };
        forecasts.push(ModelForecasts {
            model: kind,
            years,
            actual: to_metric(&actual_z)?,
            forecast: to_metric(&forecast_z)?,
        });
    }
    let models = forecasts
        .iter()
        .map(|f| Ok(ModelMetrics::new(f.model, &metrics::evaluate(&f.actual, &f.forecast)?)))
        .collect::<Result<Vec<_>>>()?;

    let effective_n = config.effective_n_for_t.unwrap_or(prep.raw.n_rows());
    let variables = stats::variable_report(
        &prep.raw,
        target,
        ReportOptions {
            orientation_flip: config.orientation_flip,
            effective_n: config.effective_n_for_t,
        },
    )?;

    let saved = |fitted: Fitted| SavedModel {
        features: prep.predictors.clone(),
        target: target.to_string(),
        scaler: prep.scaler.clone(),
        fitted,
    };
    let report = EvaluationReport {
        metric_scale: config.metric_scale,
        models,
        enr_coefficients: prep
            .predictors
            .iter()
            .zip(&linear.coefficients)
            .map(|(v, c)| Coefficient {
                variable: v.clone(),
                coefficient: *c,
            })
            .collect(),
        enr_intercept: linear.intercept,
        best_lambda: sweep.best_lambda,
        l1_ratio: enr_config.l1_ratio,
        penalty_interpretation: PENALTY_INTERPRETATION.to_string(),
        variable_stats: variables.iter().map(VariableRow::from).collect(),
        effective_n_for_t: effective_n,
        split: SplitSummary {
            mode: config.split_mode,
            n_train: prep.train_raw.n_rows(),
            n_test: prep.test_raw.n_rows(),
            train_years: prep.train_raw.years().to_vec(),
            test_years,
        },
        provenance: Provenance {
            seed: config.seed,
            config_hash: config.hash(),
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix: started,
            finished_unix: now_unix(),
        },
    };
    Ok(RunArtifacts {
        report,
        forecasts,
        sweep,
        lstm_loss,
        enr: saved(Fitted::ElasticNet { linear }),
        lstm: saved(Fitted::Lstm {
            window_length: lstm_config.window_length,
            params: lstm_params,
        }),
        rf: saved(Fitted::RandomForest { forest }),
    })
}

type LstmEval = (Vec<i64>, Vec<f64>, Vec<f64>);

/// Windows are cut from the full year-ordered table, standardized with the
/// training scaler. A window belongs to the split of its last row, so a test
/// window's history can reach back into training years. Test rows too early
/// to fill a window get no LSTM forecast.
fn fit_lstm(
    prep: &Prepared,
    config: &recurrent::TrainConfig,
    target: &str,
) -> Result<(LstmParams, Vec<f64>, LstmEval)> {
    let full_z = transform(&prep.raw, &prep.scaler)?;
    let (x, y) = prep.xy(&full_z, target)?;
    let windows = recurrent::make_windows(&x, &y, config.window_length)?;
    let years = prep.raw.years();
    let is_test = |year: i64| prep.test_raw.years().binary_search(&year).is_ok();
    let (mut train_w, mut test_w) = (Vec::new(), Vec::new());
    for (k, w) in windows.into_iter().enumerate() {
        let year = years[k + config.window_length - 1];
        if is_test(year) {
            test_w.push((year, w));
        } else {
            train_w.push(w);
        }
    }
    if test_w.is_empty() {
        return Err(Error::Config(format!(
            "no test row has {} years of history for the LSTM",
            config.window_length
        )));
    }
    let (params, loss) = recurrent::train_windows(&train_w, prep.predictors.len(), config)?;
    let (test_years, test_windows): (Vec<i64>, Vec<_>) = test_w.into_iter().unzip();
    let forecast = recurrent::predict_windows(&params, &test_windows)?;
    let actual = test_windows.iter().map(|w| w.target).collect();
    Ok((params, loss, (test_years, actual, forecast)))
}

fn loss_csv(loss: &[f64]) -> String {
    let mut s = String::from("epoch,loss\n");
    for (k, l) in loss.iter().enumerate() {
        s.push_str(&format!("{},{l}\n", k + 1));
    }
    s
}

/// Writes predictions, the sweep curve, the LSTM loss curve and the three
/// saved models, then `report.json`.
pub fn cmd_run(config: &RunConfig) -> Result<RunArtifacts> {
    let artifacts = compute_run(config)?;
    let dir = &config.output_dir;
    let models_dir = dir.join("models");
    create_dir(&models_dir)?;
    for f in &artifacts.forecasts {
        write_file(&dir.join(format!("predictions_{}.csv", f.model.file_stem())), &f.to_csv())?;
    }
    write_file(&dir.join("sweep_curve.csv"), &artifacts.sweep.curve_csv())?;
    write_file(&dir.join("lstm_loss.csv"), &loss_csv(&artifacts.lstm_loss))?;
    for kind in ModelKind::ALL {
        write_file(
            &models_dir.join(format!("{}.json", kind.file_stem())),
            &artifacts.model(kind).to_json(),
        )?;
    }
    write_file(&dir.join("report.json"), &artifacts.report.to_json())?;
    Ok(artifacts)
}

// ---------------------------------------------------------------- predict

/// Applies a saved model to a dataset and writes `year,forecast` CSV in
/// original target units.
pub fn cmd_predict(model_path: &Path, dataset_path: &Path, out_path: &Path) -> Result<Vec<Prediction>> {
    let model = SavedModel::load(model_path)?;
    let table = dataset::load_csv(dataset_path)?;
    let preds = model.predict(&table)?;
    if let Some(parent) = out_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    write_file(out_path, &predictions_csv(&preds))?;
    Ok(preds)
}

