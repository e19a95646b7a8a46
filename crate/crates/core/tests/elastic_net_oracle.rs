mod common;

use cjdlab::elastic_net::{self, default_grid, fit, log_grid, objective, sweep, ElasticNetConfig};
use cjdlab::error::{Error, ModelError};
use cjdlab::rng::Rng;
use cjdlab::Matrix;

use common::*;

fn tight(lambda: f64, l1_ratio: f64) -> ElasticNetConfig {
    ElasticNetConfig {
        lambda,
        l1_ratio,
        max_iter: 200_000,
        tol: 1e-13,
        ..Default::default()
    }
}

#[test]
fn pure_ridge_matches_closed_form() {
    for k in 0..15 {
        let mut rng = Rng::stream(501, k);
        let (x, y) = regression_instance(12 + 2 * k as usize, 1 + k as usize % 5, &mut rng);
        let lambda = 0.05 + 0.1 * k as f64;
        let model = fit(&x, &y, &tight(lambda, 0.0)).unwrap();
        let want = ridge(&x, &y, lambda);
        for (a, b) in model.coefficients.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        assert!((model.intercept - cjdlab::linalg::mean(&y)).abs() < 1e-12);
    }
}

#[test]
fn kkt_conditions_hold_at_the_solution() {
    for k in 0..15 {
        let mut rng = Rng::stream(502, k);
        let (x, y) = regression_instance(30, 4, &mut rng);
        let cfg = tight(0.05 + 0.05 * k as f64, 0.3 + 0.04 * k as f64);
        let m = fit(&x, &y, &cfg).unwrap();
        let n = y.len() as f64;
        let pred = elastic_net::predict(&m, &x).unwrap();
        for j in 0..4 {
            // Gradient of the smooth part plus ridge term.
            let g = -(0..x.rows()).map(|i| x[(i, j)] * (y[i] - pred[i])).sum::<f64>() / n
                + cfg.lambda * (1.0 - cfg.l1_ratio) * m.coefficients[j];
            let l1 = cfg.lambda * cfg.l1_ratio;
            if m.coefficients[j] == 0.0 {
                assert!(g.abs() <= l1 + 1e-9);
            } else {
                assert!((g + l1 * m.coefficients[j].signum()).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn large_penalty_zeros_every_coefficient() {
    let mut rng = Rng::new(503);
    let (x, y) = regression_instance(25, 3, &mut rng);
    let n = y.len() as f64;
    let ybar = cjdlab::linalg::mean(&y);
    let max_rho = (0..3)
        .map(|j| ((0..25).map(|i| x[(i, j)] * (y[i] - ybar)).sum::<f64>() / n).abs())
        .fold(0.0, f64::max);
    let alpha = 0.5;
    let m = fit(&x, &y, &tight(max_rho / alpha * 1.0001, alpha)).unwrap();
    assert!(m.coefficients.iter().all(|b| *b == 0.0));
    let m = fit(&x, &y, &tight(max_rho / alpha * 0.99, alpha)).unwrap();
    assert!(m.coefficients.iter().any(|b| *b != 0.0));
}

#[test]
fn coefficients_shrink_along_the_grid() {
    let mut rng = Rng::new(504);
    let (x, y) = regression_instance(40, 5, &mut rng);
    let norms: Vec<f64> = log_grid(1e-3, 5.0, 30)
        .into_iter()
        .map(|l| fit(&x, &y, &tight(l, 0.5)).unwrap().l1_norm())
        .collect();
    for w in norms.windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "{norms:?}");
    }
    assert_eq!(*norms.last().unwrap(), 0.0);
}

#[test]
fn duplicated_columns_share_weight() {
    let mut rng = Rng::new(505);
    let base = standardize_columns(&random_matrix(30, 2, &mut rng));
    let x = Matrix::from_columns(&[base.column(0), base.column(0), base.column(1)]);
    let y: Vec<f64> = (0..30).map(|i| 2.0 * base[(i, 0)] - base[(i, 1)] + 0.1 * rng.normal()).collect();
    let m = fit(&x, &y, &tight(0.05, 0.5)).unwrap();
    assert!((m.coefficients[0] - m.coefficients[1]).abs() < 1e-9);
    assert!(m.coefficients[0] > 0.5);
    // Pure lasso is free to split the weight however it likes; with the
    // ridge part the split is unique, and the objective ties at every split.
    let swapped = elastic_net::LinearModel {
        coefficients: vec![m.coefficients[1], m.coefficients[0], m.coefficients[2]],
        ..m.clone()
    };
    let cfg = tight(0.05, 0.5);
    assert!((objective(&x, &y, &m, &cfg).unwrap() - objective(&x, &y, &swapped, &cfg).unwrap()).abs() < 1e-15);
}

#[test]
fn unstandardized_input_is_rejected() {
    let x = Matrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]);
    assert!(matches!(
        fit(&x, &[1.0, 2.0, 3.0], &ElasticNetConfig::default()),
        Err(ModelError::NotStandardized { .. })
    ));
}

#[test]
fn sweep_picks_the_curve_minimum() {
    let mut rng = Rng::new(506);
    let (x, y) = regression_instance(40, 4, &mut rng);
    let (tx, vx) = (x.select_rows(&(0..30).collect::<Vec<_>>()), x.select_rows(&(30..40).collect::<Vec<_>>()));
    let tx = standardize_columns(&tx);
    let result = sweep(&tx, &y[..30], &vx, &y[30..], &default_grid(), &ElasticNetConfig::default()).unwrap();
    assert_eq!(result.curve.len(), 50);
    let min = result.curve.iter().map(|p| p.val_rmse).fold(f64::INFINITY, f64::min);
    let best = result.curve.iter().find(|p| p.lambda == result.best_lambda).unwrap();
    assert_eq!(best.val_rmse, min);
    assert_eq!(result.curve[0].lambda, 1e-4);
    assert_eq!(result.curve[49].lambda, 10.0);
    let one = sweep(&tx, &y[..30], &vx, &y[30..], &[0.3], &ElasticNetConfig::default()).unwrap();
    assert_eq!(one.curve_csv().lines().count(), 2);
    assert!(matches!(
        sweep(&tx, &y[..30], &vx, &y[30..], &[], &ElasticNetConfig::default()),
        Err(Error::Model(ModelError::EmptyGrid))
    ));
}
