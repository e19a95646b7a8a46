//! Independent reference implementations shared by the integration tests.
//! None of these call into the code they check beyond data types.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

use cjdlab::linalg::{mean, population_variance};
use cjdlab::rng::Rng;
use cjdlab::Matrix;

/// Columns rescaled to mean 0, population variance 1.
pub fn standardize_columns(x: &Matrix) -> Matrix {
    let mut out = x.clone();
    for j in 0..x.cols() {
        let col = x.column(j);
        let (m, s) = (mean(&col), population_variance(&col).sqrt());
        for i in 0..x.rows() {
            out[(i, j)] = (x[(i, j)] - m) / s;
        }
    }
    out
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut Rng) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.normal()).collect();
    Matrix::from_row_major(rows, cols, data)
}

/// Standardized design, response with a random linear signal plus noise.
pub fn regression_instance(n: usize, p: usize, rng: &mut Rng) -> (Matrix, Vec<f64>) {
    let x = standardize_columns(&random_matrix(n, p, rng));
    let beta: Vec<f64> = (0..p).map(|_| rng.uniform(-2.0, 2.0)).collect();
    let y = (0..n)
        .map(|i| 0.7 + x.row(i).iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>() + 0.3 * rng.normal())
        .collect();
    (x, y)
}

/// Least squares with intercept via the normal equations on [1, X].
pub fn ols(x: &Matrix, y: &[f64]) -> (Vec<f64>, f64) {
    let (n, p) = (x.rows(), x.cols());
    let a = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { x[(i, j - 1)] });
    let b = DVector::from_column_slice(y);
    let ata = a.transpose() * &a;
    let atb = a.transpose() * b;
    let sol = ata.cholesky().expect("design has full column rank").solve(&atb);
    ((1..=p).map(|j| sol[j]).collect(), sol[0])
}

/// Ridge with intercept on standardized X: β = (XᵀX/n + λI)⁻¹ Xᵀ(y − ȳ)/n.
pub fn ridge(x: &Matrix, y: &[f64], lambda: f64) -> Vec<f64> {
    let (n, p) = (x.rows(), x.cols());
    let ybar = y.iter().sum::<f64>() / n as f64;
    let a = DMatrix::from_fn(n, p, |i, j| x[(i, j)]);
    let yc = DVector::from_iterator(n, y.iter().map(|v| v - ybar));
    let lhs = a.transpose() * &a / n as f64 + DMatrix::identity(p, p) * lambda;
    let rhs = a.transpose() * yc / n as f64;
    let sol = lhs.cholesky().expect("positive definite").solve(&rhs);
    sol.iter().copied().collect()
}

/// Elastic-net objective written out directly.
pub fn enet_objective(x: &Matrix, y: &[f64], beta: &[f64], b: f64, lambda: f64, alpha: f64) -> f64 {
    let n = y.len() as f64;
    let rss: f64 = (0..x.rows())
        .map(|i| {
            let fit: f64 = x.row(i).iter().zip(beta).map(|(a, c)| a * c).sum::<f64>() + b;
            (y[i] - fit).powi(2)
        })
        .sum();
    let l1: f64 = beta.iter().map(|v| v.abs()).sum();
    let l2: f64 = beta.iter().map(|v| v * v).sum();
    rss / (2.0 * n) + lambda * (alpha * l1 + 0.5 * (1.0 - alpha) * l2)
}

/// Minimum of the objective over a `steps`×`steps` grid on [−r, r]², with
/// the intercept at its optimum ȳ (exact for standardized X).
pub fn brute_force_min_2d(x: &Matrix, y: &[f64], lambda: f64, alpha: f64, r: f64, steps: usize) -> f64 {
    let ybar = y.iter().sum::<f64>() / y.len() as f64;
    let mut best = f64::INFINITY;
    for a in 0..steps {
        for b in 0..steps {
            let b0 = -r + 2.0 * r * a as f64 / (steps - 1) as f64;
            let b1 = -r + 2.0 * r * b as f64 / (steps - 1) as f64;
            best = best.min(enet_objective(x, y, &[b0, b1], ybar, lambda, alpha));
        }
    }
    best
}

/// Relative error with a floor so that two near-zero values compare equal.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

/// Central differences of `loss` at every coordinate of `theta`.
pub fn finite_difference(theta: &[f64], step: f64, mut loss: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut work = theta.to_vec();
    (0..theta.len())
        .map(|k| {
            work[k] = theta[k] + step;
            let up = loss(&work);
            work[k] = theta[k] - step;
            let down = loss(&work);
            work[k] = theta[k];
            (up - down) / (2.0 * step)
        })
        .collect()
}

/// Exhaustive split search by direct variance computation: every feature,
/// every midpoint between consecutive distinct values. Returns
/// (feature, threshold, reduction) for all candidates.
pub fn all_splits(x: &Matrix, y: &[f64], features: &[usize]) -> Vec<(usize, f64, f64)> {
    let n = y.len() as f64;
    let var = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / v.len() as f64
    };
    let parent = var(y);
    let mut out = Vec::new();
    for &f in features {
        let mut values: Vec<f64> = (0..x.rows()).map(|i| x[(i, f)]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let thr = (w[0] + w[1]) / 2.0;
            let (l, r): (Vec<f64>, Vec<f64>) = {
                let mut l = Vec::new();
                let mut r = Vec::new();
                for i in 0..x.rows() {
                    if x[(i, f)] <= thr {
                        l.push(y[i]);
                    } else {
                        r.push(y[i]);
                    }
                }
                (l, r)
            };
            let child = (l.len() as f64 * var(&l) + r.len() as f64 * var(&r)) / n;
            out.push((f, thr, parent - child));
        }
    }
    out
}

/// One line per acceptance criterion.
pub fn report(id: u32, name: &str, passed: bool, detail: &str) {
    println!("[{}] criterion {id}: {name} ({detail})", if passed { "PASS" } else { "FAIL" });
}
