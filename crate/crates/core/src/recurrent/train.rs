//! Full-batch LSTM training on sliding many-to-one windows.
//!
//! A window is `window_length` consecutive rows of predictors; its target is
//! the target column at the window's last row. The loss is the mean squared
//! error over all windows. Each epoch computes the exact batch gradient,
//! clips its global L2 norm to `gradient_clip_norm`, and takes one Adam step.

use serde::{Deserialize, Serialize};

use super::{lstm_backward, lstm_forward, LstmParams};
use crate::dataset::TimeSeriesTable;
use crate::error::ModelError;
use crate::linalg::{l2_norm, Matrix};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub hidden_size: usize,
    pub window_length: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub gradient_clip_norm: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden_size: 16,
            window_length: 4,
            epochs: 500,
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            gradient_clip_norm: 5.0,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.hidden_size == 0 {
            return Err(ModelError::InvalidConfig("hidden_size must be positive".into()));
        }
        if self.window_length == 0 {
            return Err(ModelError::InvalidConfig("window_length must be positive".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(ModelError::InvalidConfig(format!("learning_rate = {}", self.learning_rate)));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(ModelError::InvalidConfig("Adam betas must lie in [0, 1)".into()));
        }
        if !(self.epsilon > 0.0) || !(self.gradient_clip_norm > 0.0) {
            return Err(ModelError::InvalidConfig("epsilon and gradient_clip_norm must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    /// window_length × input
    pub sequence: Matrix,
    pub target: f64,
}

/// One window ending at every row from `window_length − 1` onward.
pub fn make_windows(features: &Matrix, targets: &[f64], window_length: usize) -> Result<Vec<Window>, ModelError> {
    if features.rows() != targets.len() {
        return Err(ModelError::ShapeMismatch(format!(
            "{} feature rows for {} targets",
            features.rows(),
            targets.len()
        )));
    }
    if window_length == 0 {
        return Err(ModelError::InvalidConfig("window_length must be positive".into()));
    }
    if features.rows() < window_length {
        return Err(ModelError::TooFewRows(format!(
            "{} rows cannot fill a window of {window_length}",
            features.rows()
        )));
    }
    Ok((window_length - 1..features.rows())
        .map(|end| {
            let idx: Vec<usize> = (end + 1 - window_length..=end).collect();
            Window {
                sequence: features.select_rows(&idx),
                target: targets[end],
            }
        })
        .collect())
}

fn batch_loss_and_gradient(params: &LstmParams, windows: &[Window]) -> Result<(f64, Vec<f64>), ModelError> {
    let mut grad = vec![0.0; params.num_params()];
    let mut loss = 0.0;
    for w in windows {
        let g = lstm_backward(params, &w.sequence, w.target)?;
        loss += g.loss;
        for (acc, v) in grad.iter_mut().zip(g.grads.to_flat()) {
            *acc += v;
        }
    }
    let scale = 1.0 / windows.len() as f64;
    grad.iter_mut().for_each(|v| *v *= scale);
    Ok((loss * scale, grad))
}

/// Trains from a fresh initialization drawn from `Rng::new(config.seed)`.
/// Returns the parameters and the batch loss measured at the start of each
/// epoch.
pub fn train_windows(
    windows: &[Window],
    input_size: usize,
    config: &TrainConfig,
) -> Result<(LstmParams, Vec<f64>), ModelError> {
    config.validate()?;
    if windows.is_empty() {
        return Err(ModelError::TooFewRows("no training windows".into()));
    }
    let mut rng = Rng::new(config.seed);
    let mut params = LstmParams::init(config.hidden_size, input_size, &mut rng);
    let mut theta = params.to_flat();
    let mut m = vec![0.0; theta.len()];
    let mut v = vec![0.0; theta.len()];
    let mut curve = Vec::with_capacity(config.epochs);

    for epoch in 1..=config.epochs {
        let (loss, mut grad) = batch_loss_and_gradient(&params, windows)?;
        curve.push(loss);
        let norm = l2_norm(&grad);
        if norm > config.gradient_clip_norm {
            let s = config.gradient_clip_norm / norm;
            grad.iter_mut().for_each(|g| *g *= s);
        }
        let bc1 = 1.0 - config.beta1.powi(epoch as i32);
        let bc2 = 1.0 - config.beta2.powi(epoch as i32);
        for k in 0..theta.len() {
            m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * grad[k];
            v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * grad[k] * grad[k];
            let m_hat = m[k] / bc1;
            let v_hat = v[k] / bc2;
            theta[k] -= config.learning_rate * m_hat / (v_hat.sqrt() + config.epsilon);
        }
        params.set_flat(&theta);
    }
    Ok((params, curve))
}

/// Trains on a standardized table: every non-target column is an input.
pub fn train(
    table: &TimeSeriesTable,
    target_column: &str,
    config: &TrainConfig,
) -> Result<(LstmParams, Vec<f64>), crate::Error> {
    let predictors = table.predictors_except(target_column)?;
    let features = table.matrix_of(&predictors)?;
    let targets = table.column(target_column)?;
    let windows = make_windows(&features, &targets, config.window_length)?;
    Ok(train_windows(&windows, predictors.len(), config)?)
}

pub fn predict_windows(params: &LstmParams, windows: &[Window]) -> Result<Vec<f64>, ModelError> {
    windows
        .iter()
        .map(|w| Ok(lstm_forward(params, &w.sequence)?.prediction))
        .collect()
}

/// Mean squared error of `params` over `windows`.
pub fn window_mse(params: &LstmParams, windows: &[Window]) -> Result<f64, ModelError> {
    let preds = predict_windows(params, windows)?;
    Ok(preds
        .iter()
        .zip(windows)
        .map(|(p, w)| (p - w.target) * (p - w.target))
        .sum::<f64>()
        / windows.len() as f64)
}
