//! Statistical-learning workbench for forecasting a yearly disease-incidence
//! series from environmental and lifestyle predictors.
//!
//! Every numerical kernel is implemented here rather than pulled from a
//! numerics crate, so that each one can be checked against an independent
//! oracle in the test suites.
//!
//! # Module structure
//!
//! - [`dataset`] - CSV loading, standard scaling, train/test splitting
//! - [`stats`] - Pearson correlation, t statistics, incomplete beta p-values,
//!   Cronbach's alpha, per-variable reports and correlation matrices
//! - [`elastic_net`] - coordinate-descent elastic net and a penalty sweep
//! - [`recurrent`] - LSTM and vanilla RNN regressors with exact BPTT
//! - [`random_forest`] - bagged CART regression trees
//! - [`metrics`] - RMSE, MBE, MAE and their significance flags
//! - [`pipeline`] - end-to-end experiment orchestration behind the CLI
//! - [`rng`] - the splitmix64 / xoshiro256** generator used everywhere
//!
//! # Example
//!
//! ```
//! use cjdlab::metrics;
//!
//! let actual = [1.0, 2.0, 3.0];
//! let forecast = [2.0, 2.0, 2.0];
//! let report = metrics::evaluate(&actual, &forecast)?;
//! assert!((report.rmse - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
//! assert_eq!(report.mbe, 0.0);
//! # Ok::<(), cjdlab::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod elastic_net;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod random_forest;
pub mod recurrent;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use linalg::Matrix;
