//! Vanilla (Elman) RNN: h_t = tanh(W_h x_t + U_h h_{t−1} + b_h), ŷ = w_y·h_T + b_y.

use serde::{Deserialize, Serialize};

use super::{check_sequence, glorot, Tensor, TensorFile, TensorReader};
use crate::error::ModelError;
use crate::linalg::{dot, l2_norm, Matrix};
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorFile", into = "TensorFile")]
pub struct RnnParams {
    pub hidden_size: usize,
    pub input_size: usize,
    /// hidden × input
    pub w_h: Matrix,
    /// hidden × hidden
    pub u_h: Matrix,
    pub b_h: Vec<f64>,
    pub w_y: Vec<f64>,
    pub b_y: f64,
}

impl RnnParams {
    pub fn zeros(hidden_size: usize, input_size: usize) -> Self {
        Self {
            hidden_size,
            input_size,
            w_h: Matrix::zeros(hidden_size, input_size),
            u_h: Matrix::zeros(hidden_size, hidden_size),
            b_h: vec![0.0; hidden_size],
            w_y: vec![0.0; hidden_size],
            b_y: 0.0,
        }
    }

    /// Glorot-uniform weights, zero biases. Draw order: W_h, U_h, w_y.
    pub fn init(hidden_size: usize, input_size: usize, rng: &mut Rng) -> Self {
        let mut p = Self::zeros(hidden_size, input_size);
        p.w_h = glorot(hidden_size, input_size, input_size, hidden_size, rng);
        p.u_h = glorot(hidden_size, hidden_size, hidden_size, hidden_size, rng);
        p.w_y = glorot(1, hidden_size, hidden_size, 1, rng).into_vec();
        p
    }

    /// Rescales U_h to the given spectral norm.
    pub fn with_recurrent_spectral_norm(mut self, target: f64) -> Self {
        let current = self.u_h.spectral_norm();
        if current > 0.0 {
            self.u_h.scale(target / current);
        }
        self
    }

    pub fn num_params(&self) -> usize {
        let (h, i) = (self.hidden_size, self.input_size);
        h * i + h * h + h + h + 1
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.num_params());
        v.extend_from_slice(self.w_h.as_slice());
        v.extend_from_slice(self.u_h.as_slice());
        v.extend_from_slice(&self.b_h);
        v.extend_from_slice(&self.w_y);
        v.push(self.b_y);
        v
    }

    pub fn set_flat(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.num_params(), "flat parameter length");
        let mut k = 0;
        let mut take = |dst: &mut [f64]| {
            dst.copy_from_slice(&flat[k..k + dst.len()]);
            k += dst.len();
        };
        take(self.w_h.as_mut_slice());
        take(self.u_h.as_mut_slice());
        take(&mut self.b_h);
        take(&mut self.w_y);
        let mut tail = [0.0];
        take(&mut tail);
        self.b_y = tail[0];
    }
}

impl From<RnnParams> for TensorFile {
    fn from(p: RnnParams) -> Self {
        TensorFile {
            kind: "rnn".into(),
            hidden_size: p.hidden_size,
            input_size: p.input_size,
            tensors: vec![
                Tensor::matrix("w_h", &p.w_h),
                Tensor::matrix("u_h", &p.u_h),
                Tensor::vector("b_h", &p.b_h),
                Tensor::vector("w_y", &p.w_y),
                Tensor::scalar("b_y", p.b_y),
            ],
        }
    }
}

impl TryFrom<TensorFile> for RnnParams {
    type Error = String;

    fn try_from(file: TensorFile) -> Result<Self, String> {
        let (h, i) = (file.hidden_size, file.input_size);
        let mut r = TensorReader::new(&file, "rnn", 5)?;
        Ok(Self {
            hidden_size: h,
            input_size: i,
            w_h: r.matrix("w_h", h, i)?,
            u_h: r.matrix("u_h", h, h)?,
            b_h: r.vector("b_h", h)?,
            w_y: r.vector("w_y", h)?,
            b_y: r.scalar("b_y")?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RnnForward {
    /// h_1..h_T
    pub hidden: Vec<Vec<f64>>,
    pub prediction: f64,
}

pub fn rnn_forward(params: &RnnParams, sequence: &Matrix) -> Result<RnnForward, ModelError> {
    check_sequence(sequence, params.input_size)?;
    let mut h = vec![0.0; params.hidden_size];
    let mut hidden = Vec::with_capacity(sequence.rows());
    for t in 0..sequence.rows() {
        let wx = params.w_h.mul_vec(sequence.row(t));
        let uh = params.u_h.mul_vec(&h);
        h = (0..params.hidden_size)
            .map(|k| (wx[k] + uh[k] + params.b_h[k]).tanh())
            .collect();
        hidden.push(h.clone());
    }
    let prediction = dot(&params.w_y, &h) + params.b_y;
    Ok(RnnForward { hidden, prediction })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RnnGradients {
    pub grads: RnnParams,
    pub loss: f64,
    pub prediction: f64,
    /// ‖∂L/∂h_t‖₂ for t = 1..T.
    pub hidden_norms: Vec<f64>,
}

/// Exact BPTT gradient of `(prediction − target)²`.
pub fn rnn_backward(params: &RnnParams, sequence: &Matrix, target: f64) -> Result<RnnGradients, ModelError> {
    let fwd = rnn_forward(params, sequence)?;
    let hs = params.hidden_size;
    let residual = fwd.prediction - target;
    let dpred = 2.0 * residual;

    let mut g = RnnParams::zeros(hs, params.input_size);
    let t_last = fwd.hidden.len() - 1;
    g.w_y = fwd.hidden[t_last].iter().map(|v| dpred * v).collect();
    g.b_y = dpred;

    let mut dh: Vec<f64> = params.w_y.iter().map(|w| dpred * w).collect();
    let mut norms = vec![0.0; fwd.hidden.len()];
    let zero = vec![0.0; hs];
    for t in (0..=t_last).rev() {
        norms[t] = l2_norm(&dh);
        let h = &fwd.hidden[t];
        let h_prev = if t > 0 { &fwd.hidden[t - 1] } else { &zero };
        let da: Vec<f64> = (0..hs).map(|k| dh[k] * (1.0 - h[k] * h[k])).collect();
        g.w_h.add_outer(&da, sequence.row(t), 1.0);
        g.u_h.add_outer(&da, h_prev, 1.0);
        for (b, d) in g.b_h.iter_mut().zip(&da) {
            *b += d;
        }
        let mut next = vec![0.0; hs];
        params.u_h.mul_transpose_vec_add(&da, &mut next);
        dh = next;
    }

    Ok(RnnGradients {
        grads: g,
        loss: residual * residual,
        prediction: fwd.prediction,
        hidden_norms: norms,
    })
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_predict_bias() {
        let mut p = RnnParams::zeros(3, 2);
        p.b_y = 0.75;
        let seq = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(rnn_forward(&p, &seq).unwrap().prediction, 0.75);
    }

    #[test]
    fn single_step_matches_dense_layer_gradient() {
        let mut rng = Rng::new(12);
        let p = RnnParams::init(3, 2, &mut rng);
        let x = [0.4, -0.7];
        let target = 0.3;
        let g = rnn_backward(&p, &Matrix::from_rows(&[x.to_vec()]), target).unwrap();

        // Dense layer ŷ = w_y · tanh(W x + b) + b_y with closed-form chain rule.
        let a: Vec<f64> = (0..3).map(|k| dot(p.w_h.row(k), &x) + p.b_h[k]).collect();
        let h: Vec<f64> = a.iter().map(|v| v.tanh()).collect();
        let y = dot(&p.w_y, &h) + p.b_y;
        let e = 2.0 * (y - target);
        for k in 0..3 {
            let da = e * p.w_y[k] * (1.0 - h[k] * h[k]);
            assert!((g.grads.b_h[k] - da).abs() < 1e-14);
            assert!((g.grads.w_y[k] - e * h[k]).abs() < 1e-14);
            for j in 0..2 {
                assert!((g.grads.w_h[(k, j)] - da * x[j]).abs() < 1e-14);
            }
            // h_0 = 0: no recurrent-weight gradient.
            assert!(g.grads.u_h.row(k).iter().all(|&v| v == 0.0));
        }
        assert!((g.grads.b_y - e).abs() < 1e-14);
    }

    #[test]
    fn spectral_rescale() {
        let mut rng = Rng::new(13);
        let p = RnnParams::init(6, 2, &mut rng).with_recurrent_spectral_norm(0.5);
        assert!((p.u_h.spectral_norm() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn json_round_trip() {
        let mut rng = Rng::new(14);
        let p = RnnParams::init(2, 2, &mut rng);
        let back: RnnParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(p, back);
        let mut flat = RnnParams::zeros(2, 2);
        flat.set_flat(&p.to_flat());
        assert_eq!(flat, p);
    }
}
