//! Correlation, reliability and significance statistics.
//!
//! The per-variable report pairs every predictor with the target and records
//! Pearson's r, R², the t statistic for H₀: ρ = 0, a two-tailed p-value from
//! the Student t distribution, and Cronbach's alpha of the standardized
//! {predictor, target} item pair. For two standardized items with correlation
//! r, alpha reduces to 2r / (1 + r).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::TimeSeriesTable;
use crate::error::StatsError;
use crate::linalg::{mean, population_variance, Matrix};

/// Continued-fraction iteration cap and relative convergence threshold.
const CF_MAX_ITER: usize = 300;
const CF_EPS: f64 = 1e-14;
const CF_TINY: f64 = 1e-300;

/// |r| within this of 1 counts as a perfect correlation.
pub const DEGENERATE_R_TOL: f64 = 1e-12;

/// Product-moment correlation coefficient.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::TooShort {
            needed: 3,
            got: x.len(),
        });
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ConstantSeries);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// t = r·√(n−2) / √(1−r²).
pub fn t_statistic(r: f64, n: usize) -> Result<f64, StatsError> {
    if n < 3 {
        return Err(StatsError::TooShort { needed: 3, got: n });
    }
    if !r.is_finite() || r.abs() > 1.0 {
        return Err(StatsError::DomainError(format!("r = {r}")));
    }
    // A sample correlation of ±1 rarely comes out exact in floating point.
    if 1.0 - r.abs() <= DEGENERATE_R_TOL {
        return Err(StatsError::DegenerateR);
    }
    Ok(r * ((n - 2) as f64).sqrt() / (1.0 - r * r).sqrt())
}

/// ln Γ(z) for z > 0 (Lanczos, g = 7, nine coefficients).
pub fn ln_gamma(z: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z < 0.5 {
        // Reflection: Γ(z)Γ(1−z) = π / sin(πz).
        let pi = std::f64::consts::PI;
        return (pi / (pi * z).sin()).ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut acc = COEF[0];
    for (k, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Continued fraction for Iₓ(a,b), modified Lentz iteration.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> Result<f64, StatsError> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let guard = |v: f64| if v.abs() < CF_TINY { CF_TINY } else { v };

    let mut c = 1.0;
    let mut d = 1.0 / guard(1.0 - qab * x / qap);
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 / guard(1.0 + aa * d);
        c = guard(1.0 + aa / c);
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 / guard(1.0 + aa * d);
        c = guard(1.0 + aa / c);
        let delta = d * c;
        h *= delta;

        if (delta - 1.0).abs() < CF_EPS {
            return Ok(h);
        }
    }
    Err(StatsError::DomainError(format!(
        "incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}"
    )))
}

/// Regularized incomplete beta function Iₓ(a, b).
pub fn incomplete_beta_reg(a: f64, b: f64, x: f64) -> Result<f64, StatsError> {
    if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
        return Err(StatsError::DomainError(format!("a = {a}, b = {b}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(StatsError::DomainError(format!("x = {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    // Closed forms; these also make Iₓ(1, 1) = x exact.
    if b == 1.0 {
        return Ok(x.powf(a));
    }
    if a == 1.0 {
        return Ok(-(b * (-x).ln_1p()).exp_m1());
    }
    let ln_front = a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b);
    let front = ln_front.exp();
    let value = if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x)? / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x)? / b
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Two-tailed p-value of a Student t statistic with `df` degrees of freedom:
/// I_{df/(df+t²)}(df/2, 1/2).
pub fn p_value_two_tailed(t: f64, df: usize) -> Result<f64, StatsError> {
    if df < 1 {
        return Err(StatsError::DomainError("df must be at least 1".into()));
    }
    if t.is_nan() {
        return Err(StatsError::DomainError("t is NaN".into()));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    let df = df as f64;
    incomplete_beta_reg(df / 2.0, 0.5, df / (df + t * t))
}

/// Cronbach's alpha, (k/(k−1))·(1 − Σ var(itemᵢ) / var(Σ items)), with
/// population variances.
pub fn cronbach_alpha<S: AsRef<[f64]>>(items: &[S]) -> Result<f64, StatsError> {
    let k = items.len();
    if k < 2 {
        return Err(StatsError::TooFewItems(k));
    }
    let n = items[0].as_ref().len();
    for item in items {
        if item.as_ref().len() != n {
            return Err(StatsError::LengthMismatch(n, item.as_ref().len()));
        }
    }
    if n == 0 {
        return Err(StatsError::DegenerateVariance);
    }
    let item_var: f64 = items.iter().map(|i| population_variance(i.as_ref())).sum();
    let totals: Vec<f64> = (0..n)
        .map(|row| items.iter().map(|i| i.as_ref()[row]).sum())
        .collect();
    let total_var = population_variance(&totals);
    if !(total_var > 0.0) {
        return Err(StatsError::DegenerateVariance);
    }
    let k = k as f64;
    Ok(k / (k - 1.0) * (1.0 - item_var / total_var))
}

/// Annotation symbols attached to a variable's statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Marker {
    /// |r| ≥ 0.7
    #[serde(rename = "*")]
    StrongR,
    /// |r| ≥ 0.8
    #[serde(rename = "**")]
    VeryStrongR,
    /// |r| ≥ 0.9
    #[serde(rename = "***")]
    ExtremeR,
    /// p ≤ 0.001
    #[serde(rename = "‡")]
    Significant,
    /// α ≥ 0.85
    #[serde(rename = "†")]
    Reliable,
    /// α ≥ 0.9
    #[serde(rename = "††")]
    HighlyReliable,
    /// |t| ≥ 5
    #[serde(rename = "¶")]
    LargeT,
}

impl Marker {
    pub fn symbol(self) -> &'static str {
        match self {
            Marker::StrongR => "*",
            Marker::VeryStrongR => "**",
            Marker::ExtremeR => "***",
            Marker::Significant => "‡",
            Marker::Reliable => "†",
            Marker::HighlyReliable => "††",
            Marker::LargeT => "¶",
        }
    }
}

impl fmt::Display for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Markers for one variable. Only the highest correlation tier and the
/// highest reliability tier are attached.
pub fn assign_markers(r: f64, t: f64, alpha: f64, p: f64) -> Vec<Marker> {
    let mut markers = Vec::new();
    let abs_r = r.abs();
    if abs_r >= 0.9 {
        markers.push(Marker::ExtremeR);
    } else if abs_r >= 0.8 {
        markers.push(Marker::VeryStrongR);
    } else if abs_r >= 0.7 {
        markers.push(Marker::StrongR);
    }
    if t.abs() >= 5.0 {
        markers.push(Marker::LargeT);
    }
    if alpha >= 0.9 {
        markers.push(Marker::HighlyReliable);
    } else if alpha >= 0.85 {
        markers.push(Marker::Reliable);
    }
    if p <= 0.001 {
        markers.push(Marker::Significant);
    }
    markers
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableStats {
    pub variable: String,
    pub r: f64,
    pub r_squared: f64,
    pub t_statistic: f64,
    pub cronbach_alpha: f64,
    pub p_value: f64,
    pub markers: Vec<Marker>,
}

impl VariableStats {
    /// Statistics implied by a correlation alone, with `n` observations.
    /// Alpha uses the two-item standardized form on |r| when `orientation_flip`.
    pub fn from_r(variable: &str, r: f64, n: usize, orientation_flip: bool) -> Result<Self, StatsError> {
        let t = t_statistic(r, n)?;
        let p = p_value_two_tailed(t, n - 2)?;
        let rr = if orientation_flip { r.abs() } else { r };
        let alpha = 2.0 * rr / (1.0 + rr);
        Ok(Self {
            variable: variable.to_string(),
            r,
            r_squared: r * r,
            t_statistic: t,
            cronbach_alpha: alpha,
            p_value: p,
            markers: assign_markers(r, t, alpha, p),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    /// Negate negatively correlated predictors before computing alpha.
    pub orientation_flip: bool,
    /// Observation count used for t and p; `None` uses the table's row count.
    pub effective_n: Option<usize>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            orientation_flip: true,
            effective_n: Some(36),
        }
    }
}

/// One [`VariableStats`] per non-target column, in table order.
pub fn variable_report(
    table: &TimeSeriesTable,
    target_column: &str,
    options: ReportOptions,
) -> Result<Vec<VariableStats>, crate::Error> {
    let target = table.column(target_column)?;
    if table.n_rows() < 3 {
        return Err(StatsError::TooShort {
            needed: 3,
            got: table.n_rows(),
        }
        .into());
    }
    let n = options.effective_n.unwrap_or(table.n_rows());
    let target_z = standardize(&target)?;
    let mut out = Vec::new();
    for name in table.predictors_except(target_column)? {
        let x = table.column(&name)?;
        let r = pearson_r(&x, &target)?;
        let t = t_statistic(r, n)?;
        let p = p_value_two_tailed(t, n - 2)?;
        let mut x_z = standardize(&x)?;
        if options.orientation_flip && r < 0.0 {
            x_z.iter_mut().for_each(|v| *v = -*v);
        }
        let alpha = cronbach_alpha(&[x_z, target_z.clone()])?;
        out.push(VariableStats {
            variable: name,
            r,
            r_squared: r * r,
            t_statistic: t,
            cronbach_alpha: alpha,
            p_value: p,
            markers: assign_markers(r, t, alpha, p),
        });
    }
    Ok(out)
}

fn standardize(v: &[f64]) -> Result<Vec<f64>, StatsError> {
    let m = mean(v);
    let s = population_variance(v).sqrt();
    if !(s > 0.0) {
        return Err(StatsError::ConstantSeries);
    }
    Ok(v.iter().map(|x| (x - m) / s).collect())
}

/// Symmetric matrix of pairwise Pearson correlations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub values: Matrix,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.names.iter().position(|n| n == a)?;
        let j = self.names.iter().position(|n| n == b)?;
        Some(self.values[(i, j)])
    }
}

/// Pairwise correlations over every column. Each pair is computed once and
/// mirrored; the diagonal is exactly 1.
pub fn correlation_matrix(table: &TimeSeriesTable) -> Result<CorrelationMatrix, StatsError> {
    let p = table.n_cols();
    let cols: Vec<Vec<f64>> = (0..p).map(|j| table.values().column(j)).collect();
    let mut values = Matrix::zeros(p, p);
    for i in 0..p {
        if cols[i].len() < 3 {
            return Err(StatsError::TooShort {
                needed: 3,
                got: cols[i].len(),
            });
        }
        if cols[i].iter().all(|v| *v == cols[i][0]) {
            return Err(StatsError::ConstantSeries);
        }
        values[(i, i)] = 1.0;
        for j in (i + 1)..p {
            let r = pearson_r(&cols[i], &cols[j])?;
            values[(i, j)] = r;
            values[(j, i)] = r;
        }
    }
    Ok(CorrelationMatrix {
        names: table.columns().to_vec(),
        values,
    })
}
