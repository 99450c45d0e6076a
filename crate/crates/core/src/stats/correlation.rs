use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use super::{check_finite, is_constant, mean, Result, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub r: f64,
    /// Two-sided p from the t statistic with n - 2 degrees of freedom.
    pub p: f64,
    pub n: usize,
}

/// Product-moment correlation with its two-sided t-test p-value.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Correlation> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch { left: x.len(), right: y.len() });
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::TooFewObservations { n, required: 3 });
    }
    check_finite(x)?;
    check_finite(y)?;
    if is_constant(x) || is_constant(y) {
        return Err(StatsError::ConstantInput);
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ConstantInput);
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    Ok(Correlation { r, p: correlation_p(r, n), n })
}

/// P(|R| >= |r|) under the null. With t = r sqrt(df / (1 - r^2)) the
/// t-distribution tail reduces to I_{1 - r^2}(df / 2, 1 / 2).
pub(crate) fn correlation_p(r: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    let one_minus = (1.0 - r * r).max(0.0);
    if one_minus == 0.0 {
        return 0.0;
    }
    beta_reg(df / 2.0, 0.5, one_minus).clamp(0.0, 1.0)
}

/// Standardized mean difference, label-1 group minus label-0 group,
/// over the pooled standard deviation.
pub fn cohens_d(values: &[f64], group: &[u32]) -> Result<f64> {
    if values.len() != group.len() {
        return Err(StatsError::LengthMismatch { left: values.len(), right: group.len() });
    }
    check_finite(values)?;
    let mut ones = Vec::new();
    let mut zeros = Vec::new();
    for (&v, &g) in values.iter().zip(group) {
        match g {
            1 => ones.push(v),
            0 => zeros.push(v),
            other => return Err(StatsError::NonBinaryLabel(other as f64)),
        }
    }
    if ones.is_empty() || zeros.is_empty() {
        return Err(StatsError::SingleGroup);
    }
    let (n1, n0) = (ones.len() as f64, zeros.len() as f64);
    if n1 + n0 < 3.0 {
        return Err(StatsError::ZeroPooledVariance);
    }
    let (m1, m0) = (mean(&ones), mean(&zeros));
    let ss = |xs: &[f64], m: f64| xs.iter().map(|v| (v - m).powi(2)).sum::<f64>();
    let pooled = (ss(&ones, m1) + ss(&zeros, m0)) / (n1 + n0 - 2.0);
    if pooled <= 0.0 {
        return Err(StatsError::ZeroPooledVariance);
    }
    Ok((m1 - m0) / pooled.sqrt())
}
