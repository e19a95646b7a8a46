//! Forecast-error metrics. Residuals are `actual − forecast`, so a positive
//! mean bias error means the model under-forecasts.

use serde::{Deserialize, Serialize};

use crate::error::MetricError;

/// RMSE below this is reported as significant.
pub const RMSE_THRESHOLD: f64 = 1.0;
/// |MBE| below this is reported as significant.
pub const MBE_THRESHOLD: f64 = 5.0;
/// MAE below this is reported as significant.
pub const MAE_THRESHOLD: f64 = 5.0;

fn check(actual: &[f64], forecast: &[f64]) -> Result<f64, MetricError> {
    if actual.len() != forecast.len() {
        return Err(MetricError::LengthMismatch(actual.len(), forecast.len()));
    }
    if actual.is_empty() {
        return Err(MetricError::Empty);
    }
    Ok(actual.len() as f64)
}

pub fn rmse(actual: &[f64], forecast: &[f64]) -> Result<f64, MetricError> {
    let n = check(actual, forecast)?;
    let sse: f64 = actual.iter().zip(forecast).map(|(o, f)| (o - f) * (o - f)).sum();
    Ok((sse / n).sqrt())
}

pub fn mbe(actual: &[f64], forecast: &[f64]) -> Result<f64, MetricError> {
    let n = check(actual, forecast)?;
    Ok(actual.iter().zip(forecast).map(|(o, f)| o - f).sum::<f64>() / n)
}

pub fn mae(actual: &[f64], forecast: &[f64]) -> Result<f64, MetricError> {
    let n = check(actual, forecast)?;
    Ok(actual.iter().zip(forecast).map(|(o, f)| (o - f).abs()).sum::<f64>() / n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub rmse: f64,
    pub mbe: f64,
    pub mae: f64,
    pub n: usize,
    pub significant_rmse: bool,
    pub significant_mbe: bool,
    pub significant_mae: bool,
}

impl MetricReport {
    /// Applies the significance thresholds to already computed values.
    pub fn from_values(rmse: f64, mbe: f64, mae: f64, n: usize) -> Self {
        Self {
            rmse,
            mbe,
            mae,
            n,
            significant_rmse: rmse < RMSE_THRESHOLD,
            significant_mbe: mbe.abs() < MBE_THRESHOLD,
            significant_mae: mae < MAE_THRESHOLD,
        }
    }
}

pub fn evaluate(actual: &[f64], forecast: &[f64]) -> Result<MetricReport, MetricError> {
    Ok(MetricReport::from_values(
        rmse(actual, forecast)?,
        mbe(actual, forecast)?,
        mae(actual, forecast)?,
        actual.len(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const O: [f64; 3] = [1.0, 2.0, 3.0];
    const F: [f64; 3] = [2.0, 2.0, 2.0];

    #[test]
    fn hand_values() {
        assert_eq!(rmse(&O, &F).unwrap(), (2.0f64 / 3.0).sqrt());
        assert_eq!(mbe(&O, &F).unwrap(), 0.0);
        assert_eq!(mae(&O, &F).unwrap(), 2.0 / 3.0);
        assert_eq!(mbe(&[3.0], &[1.0]).unwrap(), 2.0);
        assert_eq!(mbe(&[1.0], &[3.0]).unwrap(), -2.0);
    }

    #[test]
    fn identical_series() {
        let r = evaluate(&O, &O).unwrap();
        assert_eq!((r.rmse, r.mbe, r.mae, r.n), (0.0, 0.0, 0.0, 3));
    }

    #[test]
    fn significance_flags() {
        let enr = MetricReport::from_values(0.179, 0.046, 0.136, 11);
        assert!(enr.significant_rmse && enr.significant_mbe && enr.significant_mae);
        let r = MetricReport::from_values(1.5, -6.0, 4.9, 11);
        assert!(!r.significant_rmse);
        assert!(!r.significant_mbe);
        assert!(r.significant_mae);
        assert!(!MetricReport::from_values(1.0, 0.0, 5.0, 1).significant_rmse);
    }

    #[test]
    fn errors() {
        assert_eq!(evaluate(&[], &[]), Err(MetricError::Empty));
        assert_eq!(rmse(&[1.0], &[1.0, 2.0]), Err(MetricError::LengthMismatch(1, 2)));
        assert_eq!(mae(&[], &[]), Err(MetricError::Empty));
    }
}
