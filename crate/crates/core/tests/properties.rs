use proptest::prelude::*;

use cjdlab::dataset::{fit_scaler, inverse_transform, split, transform, SplitMode, SplitSpec, TimeSeriesTable};
use cjdlab::linalg::{mean, population_variance};
use cjdlab::metrics::{mae, mbe, rmse};
use cjdlab::stats::{incomplete_beta_reg, p_value_two_tailed, pearson_r, t_statistic};
use cjdlab::Matrix;

fn table(rows: &[Vec<f64>]) -> TimeSeriesTable {
    let cols = rows[0].len();
    TimeSeriesTable::new(
        (0..rows.len() as i64).map(|y| 1990 + y).collect(),
        (0..cols).map(|j| format!("c{j}")).collect(),
        Matrix::from_rows(rows),
    )
    .unwrap()
}

fn non_constant_rows(cols: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1e3..1e3f64, cols), 3..30).prop_filter(
        "every column varies",
        move |rows| (0..cols).all(|j| population_variance(&rows.iter().map(|r| r[j]).collect::<Vec<_>>()) > 1e-6),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn scaler_round_trips(rows in non_constant_rows(3)) {
        let t = table(&rows);
        let params = fit_scaler(&t, t.columns()).unwrap();
        let z = transform(&t, &params).unwrap();
        for j in 0..3 {
            let col = z.values().column(j);
            prop_assert!(mean(&col).abs() < 1e-9);
            prop_assert!((population_variance(&col) - 1.0).abs() < 1e-9);
        }
        let back = inverse_transform(&z, &params).unwrap();
        for (a, b) in back.values().as_slice().iter().zip(t.values().as_slice()) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn split_partitions_rows(
        n in 3usize..60,
        fraction in 0.05f64..0.95,
        seed in any::<u64>(),
        random in any::<bool>(),
    ) {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
        let t = table(&rows);
        let k = (n as f64 * fraction).floor() as usize;
        let spec = SplitSpec {
            train_fraction: fraction,
            mode: if random { SplitMode::SeededRandom } else { SplitMode::Chronological },
            seed,
        };
        match split(&t, &spec) {
            Err(_) => prop_assert!(k < 2 || k == n),
            Ok((train, test)) => {
                prop_assert_eq!(train.n_rows(), k);
                prop_assert_eq!(train.n_rows() + test.n_rows(), n);
                let mut years: Vec<i64> = train.years().iter().chain(test.years()).copied().collect();
                prop_assert!(train.years().windows(2).all(|w| w[0] < w[1]));
                prop_assert!(test.years().windows(2).all(|w| w[0] < w[1]));
                years.sort_unstable();
                prop_assert_eq!(years, t.years().to_vec());
                if !random {
                    prop_assert!(train.years().last() < test.years().first());
                }
            }
        }
    }

    #[test]
    fn pearson_is_affine_invariant(
        pairs in prop::collection::vec((-100.0..100.0f64, -100.0..100.0f64), 3..40),
        a in 0.1f64..10.0,
        b in -50.0f64..50.0,
        c in 0.1f64..10.0,
        d in -50.0f64..50.0,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        prop_assume!(population_variance(&x) > 1e-6 && population_variance(&y) > 1e-6);
        let r = pearson_r(&x, &y).unwrap();
        prop_assert!((-1.0..=1.0).contains(&r));
        let xs: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let ys: Vec<f64> = y.iter().map(|v| c * v + d).collect();
        prop_assert!((pearson_r(&xs, &ys).unwrap() - r).abs() < 1e-9);
        let neg: Vec<f64> = x.iter().map(|v| -a * v + b).collect();
        prop_assert!((pearson_r(&neg, &y).unwrap() + r).abs() < 1e-9);
        prop_assert!((pearson_r(&y, &x).unwrap() - r).abs() < 1e-12);
    }

    #[test]
    fn metric_ordering(pairs in prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64), 1..50)) {
        let (a, f): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let (r, b, m) = (rmse(&a, &f).unwrap(), mbe(&a, &f).unwrap(), mae(&a, &f).unwrap());
        prop_assert!(b.abs() <= m * (1.0 + 1e-12) + 1e-12);
        prop_assert!(m <= r * (1.0 + 1e-12) + 1e-12);
        prop_assert_eq!(rmse(&a, &a).unwrap(), 0.0);
        prop_assert!((mbe(&f, &a).unwrap() + b).abs() < 1e-9);
    }

    #[test]
    fn incomplete_beta_reflection(a in 0.1f64..50.0, b in 0.1f64..50.0, x in 0.0f64..=1.0) {
        let lhs = incomplete_beta_reg(a, b, x).unwrap();
        let rhs = incomplete_beta_reg(b, a, 1.0 - x).unwrap();
        prop_assert!((0.0..=1.0).contains(&lhs));
        prop_assert!((lhs + rhs - 1.0).abs() < 1e-10, "{} + {} at ({}, {}, {})", lhs, rhs, a, b, x);
    }

    #[test]
    fn incomplete_beta_is_monotone_in_x(a in 0.2f64..20.0, b in 0.2f64..20.0, x in 0.0f64..0.99, dx in 0.0f64..0.01) {
        let lo = incomplete_beta_reg(a, b, x).unwrap();
        let hi = incomplete_beta_reg(a, b, x + dx).unwrap();
        prop_assert!(hi >= lo - 1e-13);
    }

    #[test]
    fn p_value_shrinks_with_abs_t(t1 in 0.0f64..30.0, dt in 0.0f64..5.0, df in 1usize..200) {
        let p1 = p_value_two_tailed(t1, df).unwrap();
        let p2 = p_value_two_tailed(t1 + dt, df).unwrap();
        prop_assert!((0.0..=1.0).contains(&p1));
        prop_assert!(p2 <= p1 + 1e-13);
        prop_assert_eq!(p_value_two_tailed(-t1, df).unwrap(), p1);
    }

    #[test]
    fn t_statistic_is_odd_and_increasing(r in -0.999f64..0.999, n in 3usize..500) {
        let t = t_statistic(r, n).unwrap();
        prop_assert!((t + t_statistic(-r, n).unwrap()).abs() < 1e-12);
        prop_assert!(t_statistic((r + 0.0005).min(0.9995), n).unwrap() >= t);
    }
}
