//! Elastic-net linear regression by cyclic coordinate descent.
//!
//! Minimizes
//!
//! ```text
//! J(β, b) = (1/2n)·‖y − Xβ − b‖² + λ·(α‖β‖₁ + ((1−α)/2)·‖β‖₂²)
//! ```
//!
//! where λ = `lambda` is the overall penalty strength and α = `l1_ratio`
//! mixes the lasso and ridge terms. Multiplying J by 2n gives the
//! unnormalized form `‖y − Xβ − b‖² + λ₁‖β‖₁ + λ₂‖β‖₂²` with
//! `λ₁ = 2nλα` and `λ₂ = nλ(1−α)`, so both parameterizations have the same
//! minimizer.
//!
//! With standardized columns ((1/n)Σxᵢⱼ² = 1) each coordinate step is
//! `β_j ← S(ρ_j, λα) / (1 + λ(1−α))`, where ρ_j is the mean product of
//! column j with the partial residual and `S(z, γ) = sign(z)·max(|z|−γ, 0)`.
//! For a general column the denominator is `(1/n)Σxᵢⱼ² + λ(1−α)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::linalg::{mean, Matrix};
use crate::metrics;

/// Column mean / variance tolerance for the standardization check.
pub const STANDARDIZATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ElasticNetConfig {
    pub lambda: f64,
    pub l1_ratio: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub fit_intercept: bool,
}

impl Default for ElasticNetConfig {
    fn default() -> Self {
        Self {
            lambda: 0.0017,
            l1_ratio: 0.5,
            max_iter: 10_000,
            tol: 1e-7,
            fit_intercept: true,
        }
    }
}

impl ElasticNetConfig {
    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(ModelError::InvalidConfig(format!("lambda = {}", self.lambda)));
        }
        if !(0.0..=1.0).contains(&self.l1_ratio) {
            return Err(ModelError::InvalidConfig(format!("l1_ratio = {}", self.l1_ratio)));
        }
        if self.max_iter == 0 {
            return Err(ModelError::InvalidConfig("max_iter must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(ModelError::InvalidConfig(format!("tol = {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub n_iterations: usize,
    pub converged: bool,
}

impl LinearModel {
    pub fn zeros(p: usize) -> Self {
        Self {
            coefficients: vec![0.0; p],
            intercept: 0.0,
            n_iterations: 0,
            converged: false,
        }
    }

    pub fn l1_norm(&self) -> f64 {
        self.coefficients.iter().map(|b| b.abs()).sum()
    }
}

#[inline]
pub fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

fn check_shapes(x: &Matrix, y: &[f64], p: Option<usize>) -> Result<(), ModelError> {
    if x.rows() != y.len() {
        return Err(ModelError::ShapeMismatch(format!(
            "X has {} rows but y has {} entries",
            x.rows(),
            y.len()
        )));
    }
    if let Some(p) = p {
        if x.cols() != p {
            return Err(ModelError::ShapeMismatch(format!(
                "X has {} columns but the model has {p} coefficients",
                x.cols()
            )));
        }
    }
    Ok(())
}

/// Value of J at `model`.
pub fn objective(
    x: &Matrix,
    y: &[f64],
    model: &LinearModel,
    config: &ElasticNetConfig,
) -> Result<f64, ModelError> {
    check_shapes(x, y, Some(model.coefficients.len()))?;
    let n = y.len() as f64;
    let fitted = predict(model, x)?;
    let rss: f64 = y.iter().zip(&fitted).map(|(a, f)| (a - f) * (a - f)).sum();
    Ok(rss / (2.0 * n) + penalty(&model.coefficients, config))
}

fn penalty(beta: &[f64], config: &ElasticNetConfig) -> f64 {
    let l1: f64 = beta.iter().map(|b| b.abs()).sum();
    let l2: f64 = beta.iter().map(|b| b * b).sum();
    config.lambda * (config.l1_ratio * l1 + 0.5 * (1.0 - config.l1_ratio) * l2)
}

/// ŷ = Xβ + b.
pub fn predict(model: &LinearModel, x: &Matrix) -> Result<Vec<f64>, ModelError> {
    if x.cols() != model.coefficients.len() {
        return Err(ModelError::ShapeMismatch(format!(
            "X has {} columns but the model has {} coefficients",
            x.cols(),
            model.coefficients.len()
        )));
    }
    Ok(x.mul_vec(&model.coefficients)
        .into_iter()
        .map(|v| v + model.intercept)
        .collect())
}

fn check_standardized(x: &Matrix) -> Result<(), ModelError> {
    for j in 0..x.cols() {
        let col = x.column(j);
        let m = mean(&col);
        let var = col.iter().map(|v| v * v).sum::<f64>() / col.len() as f64 - m * m;
        if m.abs() > STANDARDIZATION_TOL || (var - 1.0).abs() > STANDARDIZATION_TOL {
            return Err(ModelError::NotStandardized {
                column: j,
                mean: m,
                variance: var,
            });
        }
    }
    Ok(())
}

pub fn fit(x: &Matrix, y: &[f64], config: &ElasticNetConfig) -> Result<LinearModel, ModelError> {
    fit_traced(x, y, config, |_| {})
}

/// As [`fit`], calling `on_sweep` with the objective after every full sweep
/// (including the intercept update).
pub fn fit_traced(
    x: &Matrix,
    y: &[f64],
    config: &ElasticNetConfig,
    mut on_sweep: impl FnMut(f64),
) -> Result<LinearModel, ModelError> {
    config.validate()?;
    check_shapes(x, y, None)?;
    let (n, p) = (x.rows(), x.cols());
    if n < 2 {
        return Err(ModelError::TooFewRows(format!("elastic net needs at least 2 rows, got {n}")));
    }
    if config.fit_intercept {
        check_standardized(x)?;
    }

    let nf = n as f64;
    let l1 = config.lambda * config.l1_ratio;
    let l2 = config.lambda * (1.0 - config.l1_ratio);
    let columns: Vec<Vec<f64>> = (0..p).map(|j| x.column(j)).collect();
    let curvature: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>() / nf)
        .collect();

    let mut beta = vec![0.0; p];
    let mut intercept = if config.fit_intercept { mean(y) } else { 0.0 };
    let mut residual: Vec<f64> = y.iter().map(|v| v - intercept).collect();
    let mut converged = false;
    let mut iterations = 0;

    let current_objective = |residual: &[f64], beta: &[f64]| {
        residual.iter().map(|r| r * r).sum::<f64>() / (2.0 * nf)
            + penalty(beta, config)
    };

    for sweep in 1..=config.max_iter {
        iterations = sweep;
        let mut max_delta: f64 = 0.0;
        for j in 0..p {
            let col = &columns[j];
            let old = beta[j];
            // ρ_j against the partial residual that excludes feature j.
            let rho = col.iter().zip(&residual).map(|(xv, r)| xv * r).sum::<f64>() / nf
                + curvature[j] * old;
            let denom = curvature[j] + l2;
            let new = if denom > 0.0 { soft_threshold(rho, l1) / denom } else { 0.0 };
            let delta = new - old;
            if delta != 0.0 {
                for (r, xv) in residual.iter_mut().zip(col) {
                    *r -= delta * xv;
                }
                beta[j] = new;
            }
            max_delta = max_delta.max(delta.abs());
        }
        if config.fit_intercept {
            let shift = mean(&residual);
            if shift != 0.0 {
                intercept += shift;
                residual.iter_mut().for_each(|r| *r -= shift);
            }
        }
        on_sweep(current_objective(&residual, &beta));
        if max_delta < config.tol {
            converged = true;
            break;
        }
    }

    Ok(LinearModel {
        coefficients: beta,
        intercept,
        n_iterations: iterations,
        converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub val_rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub best_lambda: f64,
    pub curve: Vec<SweepPoint>,
}

impl SweepResult {
    /// `lambda,val_rmse` CSV with full-precision values.
    pub fn curve_csv(&self) -> String {
        let mut s = String::from("lambda,val_rmse\n");
        for p in &self.curve {
            s.push_str(&format!("{},{}\n", p.lambda, p.val_rmse));
        }
        s
    }
}

/// `points` values spaced evenly in log10 between `lo` and `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..points)
                .map(|k| {
                    if k == points - 1 {
                        hi
                    } else {
                        10f64.powf(a + (b - a) * k as f64 / (points - 1) as f64)
                    }
                })
                .collect()
        }
    }
}

/// Default penalty grid: 50 log-spaced points in [1e-4, 10].
pub fn default_grid() -> Vec<f64> {
    log_grid(1e-4, 10.0, 50)
}

/// Fits one model per grid value on the training data and scores each on the
/// validation data. The best value minimizes validation RMSE; exact ties go
/// to the larger penalty. Grid points are fitted in parallel; the result is
/// identical to a sequential run.
pub fn sweep(
    x_train: &Matrix,
    y_train: &[f64],
    x_val: &Matrix,
    y_val: &[f64],
    grid: &[f64],
    base: &ElasticNetConfig,
) -> Result<SweepResult, crate::Error> {
    if grid.is_empty() {
        return Err(ModelError::EmptyGrid.into());
    }
    if let Some(bad) = grid.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
        return Err(ModelError::InvalidConfig(format!("grid value {bad}")).into());
    }
    let curve = grid
        .par_iter()
        .map(|&lambda| -> Result<SweepPoint, crate::Error> {
            let model = fit(x_train, y_train, &base.with_lambda(lambda))?;
            let pred = predict(&model, x_val)?;
            Ok(SweepPoint {
                lambda,
                val_rmse: metrics::rmse(y_val, &pred)?,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let best = select_best(&curve);
    Ok(SweepResult {
        best_lambda: best.lambda,
        curve,
    })
}

fn select_best(curve: &[SweepPoint]) -> SweepPoint {
    let mut best = curve[0];
    for &p in &curve[1..] {
        if p.val_rmse < best.val_rmse || (p.val_rmse == best.val_rmse && p.lambda > best.lambda) {
            best = p;
        }
    }
    best
}
