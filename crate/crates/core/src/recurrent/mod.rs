//! Recurrent regressors trained by exact backpropagation through time.
//!
//! Both networks are many-to-one: they read a `T × input` sequence (one row
//! per time step), start from zero state, and emit a single output from the
//! final hidden state through a linear head. The training loss for one
//! sequence is the squared error `(prediction − target)²`.
//!
//! Parameters serialize to a shape-tagged JSON layout:
//!
//! ```json
//! {"kind": "lstm", "hidden_size": 16, "input_size": 9,
//!  "tensors": [{"name": "w_f", "shape": [16, 25], "data": [...]}, ...]}
//! ```
//!
//! Matrices are flattened row-major. The tensor order is also the order of
//! the flat parameter vector used by the optimizer and gradient checks.

mod lstm;
mod profile;
mod rnn;
mod train;

pub use lstm::{lstm_backward, lstm_forward, LstmForward, LstmGradients, LstmParams, LstmStep};
pub use profile::{gradient_norm_profile, vanishing_gradient_benchmark, GradientProfile, Recurrent};
pub use rnn::{rnn_backward, rnn_forward, RnnForward, RnnGradients, RnnParams};
pub use train::{make_windows, predict_windows, train, train_windows, window_mse, TrainConfig, Window};

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::linalg::Matrix;
use crate::rng::Rng;

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Glorot-uniform matrix: U(−l, l) with l = √(6 / (fan_in + fan_out)).
pub(crate) fn glorot(rows: usize, cols: usize, fan_in: usize, fan_out: usize, rng: &mut Rng) -> Matrix {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let data = (0..rows * cols).map(|_| rng.uniform(-limit, limit)).collect();
    Matrix::from_row_major(rows, cols, data)
}

pub(crate) fn check_sequence(seq: &Matrix, input_size: usize) -> Result<(), ModelError> {
    if seq.rows() == 0 {
        return Err(ModelError::ShapeMismatch("sequence has no time steps".into()));
    }
    if seq.cols() != input_size {
        return Err(ModelError::ShapeMismatch(format!(
            "sequence has {} features per step, network expects {input_size}",
            seq.cols()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl Tensor {
    fn matrix(name: &str, m: &Matrix) -> Self {
        Self {
            name: name.into(),
            shape: vec![m.rows(), m.cols()],
            data: m.as_slice().to_vec(),
        }
    }

    fn vector(name: &str, v: &[f64]) -> Self {
        Self {
            name: name.into(),
            shape: vec![v.len()],
            data: v.to_vec(),
        }
    }

    fn scalar(name: &str, v: f64) -> Self {
        Self {
            name: name.into(),
            shape: vec![],
            data: vec![v],
        }
    }
}

/// On-disk layout shared by both network types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorFile {
    pub kind: String,
    pub hidden_size: usize,
    pub input_size: usize,
    pub tensors: Vec<Tensor>,
}

/// Pulls tensors out of a [`TensorFile`] in declaration order, checking
/// names and shapes.
pub(crate) struct TensorReader<'a> {
    tensors: std::slice::Iter<'a, Tensor>,
}

impl<'a> TensorReader<'a> {
    pub(crate) fn new(file: &'a TensorFile, kind: &str, expected: usize) -> Result<Self, String> {
        if file.kind != kind {
            return Err(format!("expected kind {kind:?}, found {:?}", file.kind));
        }
        if file.tensors.len() != expected {
            return Err(format!("expected {expected} tensors, found {}", file.tensors.len()));
        }
        if file.hidden_size == 0 || file.input_size == 0 {
            return Err("hidden_size and input_size must be positive".into());
        }
        Ok(Self {
            tensors: file.tensors.iter(),
        })
    }

    fn take(&mut self, name: &str, shape: &[usize]) -> Result<&'a Tensor, String> {
        let t = self.tensors.next().ok_or_else(|| format!("missing tensor {name}"))?;
        if t.name != name {
            return Err(format!("expected tensor {name}, found {}", t.name));
        }
        if t.shape != shape {
            return Err(format!("tensor {name} has shape {:?}, expected {shape:?}", t.shape));
        }
        let len: usize = shape.iter().product();
        if t.data.len() != len {
            return Err(format!("tensor {name} has {} values, expected {len}", t.data.len()));
        }
        if t.data.iter().any(|v| !v.is_finite()) {
            return Err(format!("tensor {name} has non-finite values"));
        }
        Ok(t)
    }

    pub(crate) fn matrix(&mut self, name: &str, rows: usize, cols: usize) -> Result<Matrix, String> {
        let t = self.take(name, &[rows, cols])?;
        Ok(Matrix::from_row_major(rows, cols, t.data.clone()))
    }

    pub(crate) fn vector(&mut self, name: &str, len: usize) -> Result<Vec<f64>, String> {
        Ok(self.take(name, &[len])?.data.clone())
    }

    pub(crate) fn scalar(&mut self, name: &str) -> Result<f64, String> {
        Ok(self.take(name, &[])?.data[0])
    }
}
