//! Single-layer LSTM with a one-neuron linear output head.
//!
//! With z_t = [h_{t−1}, x_t]:
//!
//! ```text
//! f_t = σ(W_f z_t + b_f)        forget gate
//! i_t = σ(W_i z_t + b_i)        input gate
//! C̃_t = tanh(W_C z_t + b_C)     candidate cell
//! o_t = σ(W_o z_t + b_o)        output gate
//! C_t = f_t ⊙ C_{t−1} + i_t ⊙ C̃_t
//! h_t = o_t ⊙ tanh(C_t)
//! ŷ   = w_y · h_T + b_y
//! ```

use serde::{Deserialize, Serialize};

use super::{check_sequence, glorot, sigmoid, Tensor, TensorFile, TensorReader};
use crate::error::ModelError;
use crate::linalg::{dot, l2_norm, Matrix};
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorFile", into = "TensorFile")]
pub struct LstmParams {
    pub hidden_size: usize,
    pub input_size: usize,
    pub w_f: Matrix,
    pub b_f: Vec<f64>,
    pub w_i: Matrix,
    pub b_i: Vec<f64>,
    pub w_c: Matrix,
    pub b_c: Vec<f64>,
    pub w_o: Matrix,
    pub b_o: Vec<f64>,
    pub w_y: Vec<f64>,
    pub b_y: f64,
}

impl LstmParams {
    pub fn zeros(hidden_size: usize, input_size: usize) -> Self {
        let z = hidden_size + input_size;
        Self {
            hidden_size,
            input_size,
            w_f: Matrix::zeros(hidden_size, z),
            b_f: vec![0.0; hidden_size],
            w_i: Matrix::zeros(hidden_size, z),
            b_i: vec![0.0; hidden_size],
            w_c: Matrix::zeros(hidden_size, z),
            b_c: vec![0.0; hidden_size],
            w_o: Matrix::zeros(hidden_size, z),
            b_o: vec![0.0; hidden_size],
            w_y: vec![0.0; hidden_size],
            b_y: 0.0,
        }
    }

    /// Glorot-uniform gate weights (fan_in = hidden + input, fan_out =
    /// hidden), Glorot-uniform head (fan_in = hidden, fan_out = 1), forget
    /// bias 1, other biases 0. Draw order: W_f, W_i, W_C, W_o, w_y.
    pub fn init(hidden_size: usize, input_size: usize, rng: &mut Rng) -> Self {
        let z = hidden_size + input_size;
        let mut p = Self::zeros(hidden_size, input_size);
        p.w_f = glorot(hidden_size, z, z, hidden_size, rng);
        p.w_i = glorot(hidden_size, z, z, hidden_size, rng);
        p.w_c = glorot(hidden_size, z, z, hidden_size, rng);
        p.w_o = glorot(hidden_size, z, z, hidden_size, rng);
        p.w_y = glorot(1, hidden_size, hidden_size, 1, rng).into_vec();
        p.b_f = vec![1.0; hidden_size];
        p
    }

    pub fn num_params(&self) -> usize {
        let z = self.hidden_size + self.input_size;
        4 * self.hidden_size * (z + 1) + self.hidden_size + 1
    }

    /// Flat parameter vector in tensor order.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.num_params());
        for (w, b) in self.gates() {
            v.extend_from_slice(w.as_slice());
            v.extend_from_slice(b);
        }
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
        take(self.w_f.as_mut_slice());
        take(&mut self.b_f);
        take(self.w_i.as_mut_slice());
        take(&mut self.b_i);
        take(self.w_c.as_mut_slice());
        take(&mut self.b_c);
        take(self.w_o.as_mut_slice());
        take(&mut self.b_o);
        take(&mut self.w_y);
        let mut tail = [0.0];
        take(&mut tail);
        self.b_y = tail[0];
    }

    fn gates(&self) -> [(&Matrix, &Vec<f64>); 4] {
        [
            (&self.w_f, &self.b_f),
            (&self.w_i, &self.b_i),
            (&self.w_c, &self.b_c),
            (&self.w_o, &self.b_o),
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.to_flat().iter().all(|v| v.is_finite())
    }
}

impl From<LstmParams> for TensorFile {
    fn from(p: LstmParams) -> Self {
        TensorFile {
            kind: "lstm".into(),
            hidden_size: p.hidden_size,
            input_size: p.input_size,
            tensors: vec![
                Tensor::matrix("w_f", &p.w_f),
                Tensor::vector("b_f", &p.b_f),
                Tensor::matrix("w_i", &p.w_i),
                Tensor::vector("b_i", &p.b_i),
                Tensor::matrix("w_c", &p.w_c),
                Tensor::vector("b_c", &p.b_c),
                Tensor::matrix("w_o", &p.w_o),
                Tensor::vector("b_o", &p.b_o),
                Tensor::vector("w_y", &p.w_y),
                Tensor::scalar("b_y", p.b_y),
            ],
        }
    }
}

impl TryFrom<TensorFile> for LstmParams {
    type Error = String;

    fn try_from(file: TensorFile) -> Result<Self, String> {
        let (h, i) = (file.hidden_size, file.input_size);
        let mut r = TensorReader::new(&file, "lstm", 10)?;
        Ok(Self {
            hidden_size: h,
            input_size: i,
            w_f: r.matrix("w_f", h, h + i)?,
            b_f: r.vector("b_f", h)?,
            w_i: r.matrix("w_i", h, h + i)?,
            b_i: r.vector("b_i", h)?,
            w_c: r.matrix("w_c", h, h + i)?,
            b_c: r.vector("b_c", h)?,
            w_o: r.matrix("w_o", h, h + i)?,
            b_o: r.vector("b_o", h)?,
            w_y: r.vector("w_y", h)?,
            b_y: r.scalar("b_y")?,
        })
    }
}

/// Activations of one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmStep {
    /// `[h_{t−1}, x_t]`
    pub z: Vec<f64>,
    pub f: Vec<f64>,
    pub i: Vec<f64>,
    pub c_tilde: Vec<f64>,
    pub o: Vec<f64>,
    pub c: Vec<f64>,
    pub h: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmForward {
    pub steps: Vec<LstmStep>,
    pub prediction: f64,
}

fn affine(w: &Matrix, b: &[f64], z: &[f64]) -> Vec<f64> {
    (0..w.rows()).map(|r| dot(w.row(r), z) + b[r]).collect()
}

pub fn lstm_forward(params: &LstmParams, sequence: &Matrix) -> Result<LstmForward, ModelError> {
    check_sequence(sequence, params.input_size)?;
    let hs = params.hidden_size;
    let mut h = vec![0.0; hs];
    let mut c = vec![0.0; hs];
    let mut steps = Vec::with_capacity(sequence.rows());
    for t in 0..sequence.rows() {
        let mut z = h.clone();
        z.extend_from_slice(sequence.row(t));
        let f: Vec<f64> = affine(&params.w_f, &params.b_f, &z).into_iter().map(sigmoid).collect();
        let i: Vec<f64> = affine(&params.w_i, &params.b_i, &z).into_iter().map(sigmoid).collect();
        let c_tilde: Vec<f64> = affine(&params.w_c, &params.b_c, &z).into_iter().map(f64::tanh).collect();
        let o: Vec<f64> = affine(&params.w_o, &params.b_o, &z).into_iter().map(sigmoid).collect();
        c = (0..hs).map(|k| f[k] * c[k] + i[k] * c_tilde[k]).collect();
        h = (0..hs).map(|k| o[k] * c[k].tanh()).collect();
        steps.push(LstmStep {
            z,
            f,
            i,
            c_tilde,
            o,
            c: c.clone(),
            h: h.clone(),
        });
    }
    let prediction = dot(&params.w_y, &h) + params.b_y;
    Ok(LstmForward { steps, prediction })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmGradients {
    /// ∂L/∂θ, laid out like the parameters.
    pub grads: LstmParams,
    pub loss: f64,
    pub prediction: f64,
    /// ‖∂L/∂h_t‖₂ for t = 1..T.
    pub hidden_norms: Vec<f64>,
}

/// Exact BPTT gradient of `(prediction − target)²`.
pub fn lstm_backward(params: &LstmParams, sequence: &Matrix, target: f64) -> Result<LstmGradients, ModelError> {
    let fwd = lstm_forward(params, sequence)?;
    let hs = params.hidden_size;
    let residual = fwd.prediction - target;
    let dpred = 2.0 * residual;

    let mut g = LstmParams::zeros(hs, params.input_size);
    let last = &fwd.steps[fwd.steps.len() - 1];
    g.w_y = last.h.iter().map(|v| dpred * v).collect();
    g.b_y = dpred;

    let mut dh: Vec<f64> = params.w_y.iter().map(|w| dpred * w).collect();
    let mut dc = vec![0.0; hs];
    let mut norms = vec![0.0; fwd.steps.len()];
    let zero = vec![0.0; hs];

    for t in (0..fwd.steps.len()).rev() {
        norms[t] = l2_norm(&dh);
        let s = &fwd.steps[t];
        let c_prev = if t > 0 { &fwd.steps[t - 1].c } else { &zero };

        let mut da_f = vec![0.0; hs];
        let mut da_i = vec![0.0; hs];
        let mut da_c = vec![0.0; hs];
        let mut da_o = vec![0.0; hs];
        for k in 0..hs {
            let tc = s.c[k].tanh();
            let d_o = dh[k] * tc;
            dc[k] += dh[k] * s.o[k] * (1.0 - tc * tc);
            da_f[k] = dc[k] * c_prev[k] * s.f[k] * (1.0 - s.f[k]);
            da_i[k] = dc[k] * s.c_tilde[k] * s.i[k] * (1.0 - s.i[k]);
            da_c[k] = dc[k] * s.i[k] * (1.0 - s.c_tilde[k] * s.c_tilde[k]);
            da_o[k] = d_o * s.o[k] * (1.0 - s.o[k]);
            dc[k] *= s.f[k];
        }

        let mut dz = vec![0.0; s.z.len()];
        for (w, gw, gb, da) in [
            (&params.w_f, &mut g.w_f, &mut g.b_f, &da_f),
            (&params.w_i, &mut g.w_i, &mut g.b_i, &da_i),
            (&params.w_c, &mut g.w_c, &mut g.b_c, &da_c),
            (&params.w_o, &mut g.w_o, &mut g.b_o, &da_o),
        ] {
            gw.add_outer(da, &s.z, 1.0);
            for (b, d) in gb.iter_mut().zip(da) {
                *b += d;
            }
            w.mul_transpose_vec_add(da, &mut dz);
        }
        dh.copy_from_slice(&dz[..hs]);
    }

    Ok(LstmGradients {
        grads: g,
        loss: residual * residual,
        prediction: fwd.prediction,
        hidden_norms: norms,
    })
}
