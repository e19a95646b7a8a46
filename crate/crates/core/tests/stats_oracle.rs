//! Special functions and p-values against statrs, plus the variable report
//! against a direct recomputation.

use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::{beta, gamma};

use cjdlab::dataset::synthetic;
use cjdlab::dataset::CANONICAL_TARGET;
use cjdlab::rng::Rng;
use cjdlab::stats::{
    cronbach_alpha, incomplete_beta_reg, ln_gamma, p_value_two_tailed, pearson_r, variable_report, Marker,
    ReportOptions, VariableStats,
};

#[test]
fn ln_gamma_matches_statrs() {
    for k in 1..400 {
        let z = k as f64 * 0.137;
        let want = gamma::ln_gamma(z);
        assert!((ln_gamma(z) - want).abs() <= 1e-12 * want.abs().max(1.0), "z = {z}");
    }
}

#[test]
fn incomplete_beta_matches_statrs() {
    let mut rng = Rng::new(31);
    for _ in 0..2000 {
        let a = rng.uniform(0.05, 60.0);
        let b = rng.uniform(0.05, 60.0);
        let x = rng.next_f64();
        let ours = incomplete_beta_reg(a, b, x).unwrap();
        let want = beta::beta_reg(a, b, x);
        assert!((ours - want).abs() < 1e-12, "I({a}, {b}, {x}) = {ours} vs {want}");
    }
}

#[test]
fn p_values_match_students_t() {
    let mut rng = Rng::new(32);
    for _ in 0..500 {
        let df = 1 + rng.below_usize(120);
        let t = rng.uniform(-15.0, 15.0);
        let dist = StudentsT::new(0.0, 1.0, df as f64).unwrap();
        let want = 2.0 * dist.cdf(-t.abs());
        let ours = p_value_two_tailed(t, df).unwrap();
        assert!(
            (ours - want).abs() <= 1e-12 + 1e-9 * want,
            "t = {t}, df = {df}: {ours} vs {want}"
        );
    }
}

#[test]
fn reference_extremes() {
    assert!(p_value_two_tailed(12.71, 34).unwrap() < 1e-12);
    let p = p_value_two_tailed(0.0, 34).unwrap();
    assert_eq!(p, 1.0);
    // Heavy-tailed df = 1 is the Cauchy distribution: p(t = 1) = 1/2.
    assert!((p_value_two_tailed(1.0, 1).unwrap() - 0.5).abs() < 1e-14);
}

fn zscore(v: &[f64]) -> Vec<f64> {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let s = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt();
    v.iter().map(|x| (x - m) / s).collect()
}

#[test]
fn bundled_dataset_report_recomputes() {
    let table = synthetic::generate(synthetic::DEFAULT_SEED);
    let rows = variable_report(&table, CANONICAL_TARGET, ReportOptions::default()).unwrap();
    assert_eq!(rows.len(), 9);
    let y = table.column(CANONICAL_TARGET).unwrap();
    let n = 36.0;
    for row in &rows {
        let x = table.column(&row.variable).unwrap();
        let r = pearson_r(&x, &y).unwrap();
        assert_eq!(row.r, r);
        let t = r * (n - 2.0f64).sqrt() / (1.0 - r * r).sqrt();
        assert!((row.t_statistic - t).abs() < 1e-12);
        let dist = StudentsT::new(0.0, 1.0, n - 2.0).unwrap();
        let p = 2.0 * dist.cdf(-t.abs());
        assert!((row.p_value - p).abs() <= 1e-12 + 1e-8 * p);
        // Two standardized items: alpha = 2|r| / (1 + |r|) after orienting.
        assert!((row.cronbach_alpha - 2.0 * r.abs() / (1.0 + r.abs())).abs() < 1e-12);
        let sign = if r < 0.0 { -1.0 } else { 1.0 };
        let flipped: Vec<f64> = zscore(&x).iter().map(|v| sign * v).collect();
        let direct = cronbach_alpha(&[flipped, zscore(&y)]).unwrap();
        assert!((row.cronbach_alpha - direct).abs() < 1e-12);
        let expect_p_marker = p <= 0.001;
        assert_eq!(row.markers.contains(&Marker::Significant), expect_p_marker);
    }
}

#[test]
fn reference_row_markers_reproduce() {
    // Reference rows with |t| ≥ 10 carry an undefined doubled ¶. Only one ¶
    // tier exists here, so doubled marks compare as single.
    let rows = [
        (-0.824, "** ¶ †† ‡"),
        (-0.879, "** ¶¶ †† ‡"),
        (0.909, "*** ¶¶ †† ‡"),
        (-0.808, "** ¶ † ‡"),
        (0.837, "** ¶ †† ‡"),
        (0.916, "*** ¶¶ †† ‡"),
        (-0.753, "* ¶ † ‡"),
        (0.849, "** ¶ †† ‡"),
        (-0.825, "** ¶ †† ‡"),
    ];
    for (r, printed) in rows {
        let s = VariableStats::from_r("v", r, 36, true).unwrap();
        let mut ours: Vec<&str> = s.markers.iter().map(|m| m.symbol()).collect();
        let mut want: Vec<&str> = printed.split(' ').map(|m| if m == "¶¶" { "¶" } else { m }).collect();
        ours.sort_unstable();
        want.sort_unstable();
        assert_eq!(ours, want, "r = {r}");
    }
}
