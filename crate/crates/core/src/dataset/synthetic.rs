//! Generator for the bundled synthetic dataset (`data/cjd_synthetic.csv`).
//!
//! Each predictor is a latent series `z_j(t) = trend_j · s(t) + curve_j · (s(t)² − 1/3) + 0.4 · e_j(t)`
//! with `s(t) = (year − 1997) / 18` and `e_j(t)` iid standard normal, so the
//! predictors are strongly but not perfectly collinear. The target latent is
//! `Σ β*_j z_j + σ ε(t)`. Both are mapped to plausible raw units by positive
//! affine maps (`center + spread · z`), which preserve coefficient signs.
//!
//! Values are written with four decimals. Draw order: for each year, the nine
//! predictor shocks in canonical order, then the target shock, all from
//! `Rng::new(seed)`.

use super::{parse_csv, TimeSeriesTable, CANONICAL_PREDICTORS, CANONICAL_TARGET};
use crate::rng::Rng;

pub const DEFAULT_SEED: u64 = 1979;
pub const FIRST_YEAR: i64 = 1979;
pub const LAST_YEAR: i64 = 2015;

/// Noise standard deviation of the target latent.
pub const NOISE_SIGMA: f64 = 0.02;

/// β* on the latent predictor scale, canonical order.
pub const TRUE_COEFFICIENTS: [f64; 9] = [0.10, 0.90, 0.005, -0.125, 0.73, -0.40, -1.39, -0.25, 0.10];

const IDIOSYNCRATIC_SCALE: f64 = 0.4;
const TARGET_CENTER: f64 = 300.0;
const TARGET_SPREAD: f64 = 40.0;

struct Predictor {
    center: f64,
    spread: f64,
    trend: f64,
    curve: f64,
}

// Canonical order; trend signs follow the direction each series moved over
// the period.
const PREDICTORS: [Predictor; 9] = [
    Predictor { center: 10_800.0, spread: 900.0, trend: -1.0, curve: 0.2 },
    Predictor { center: 360.0, spread: 15.0, trend: 1.0, curve: 0.1 },
    Predictor { center: 11_200.0, spread: 700.0, trend: -0.8, curve: -0.3 },
    Predictor { center: 4_600.0, spread: 350.0, trend: -0.7, curve: 0.3 },
    Predictor { center: 390.0, spread: 25.0, trend: 1.0, curve: -0.2 },
    Predictor { center: 1.30, spread: 0.12, trend: -1.0, curve: 0.0 },
    Predictor { center: 25.0, spread: 6.0, trend: 0.9, curve: 0.2 },
    Predictor { center: 27.0, spread: 4.0, trend: -0.9, curve: -0.1 },
    Predictor { center: 12.0, spread: 3.0, trend: 0.8, curve: 0.2 },
];

/// CSV text of the synthetic dataset for `seed`.
pub fn csv_text(seed: u64) -> String {
    let mut rng = Rng::new(seed);
    let mut out = String::from("year");
    for name in CANONICAL_PREDICTORS {
        out.push(',');
        out.push_str(name);
    }
    out.push(',');
    out.push_str(CANONICAL_TARGET);
    out.push('\n');

    for year in FIRST_YEAR..=LAST_YEAR {
        let s = (year - 1997) as f64 / 18.0;
        let mut target = 0.0;
        out.push_str(&year.to_string());
        for (p, beta) in PREDICTORS.iter().zip(TRUE_COEFFICIENTS) {
            let z = p.trend * s + p.curve * (s * s - 1.0 / 3.0) + IDIOSYNCRATIC_SCALE * rng.normal();
            target += beta * z;
            out.push_str(&format!(",{:.4}", p.center + p.spread * z));
        }
        target += NOISE_SIGMA * rng.normal();
        out.push_str(&format!(",{:.4}\n", TARGET_CENTER + TARGET_SPREAD * target));
    }
    out
}

pub fn generate(seed: u64) -> TimeSeriesTable {
    parse_csv(&csv_text(seed)).expect("generator emits a valid table")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_matches_canonical_schema() {
        let t = generate(DEFAULT_SEED);
        assert_eq!(t.n_rows(), 37);
        assert_eq!(t.years()[0], 1979);
        assert_eq!(t.years()[36], 2015);
        assert_eq!(t.n_cols(), 10);
        assert_eq!(t.columns()[9], CANONICAL_TARGET);
    }

    #[test]
    fn deterministic() {
        assert_eq!(csv_text(3), csv_text(3));
        assert_ne!(csv_text(3), csv_text(4));
    }
}
