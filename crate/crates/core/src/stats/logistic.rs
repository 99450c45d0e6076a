use statrs::function::erf::erfc;

use super::{check_finite, is_constant, mean, Result, StatsError};

const MAX_ITERATIONS: usize = 25;
const GRADIENT_TOLERANCE: f64 = 1e-8;
/// Slopes beyond this (per standard deviation of the predictor) are
/// treated as quasi-separation.
const SEPARATION_SLOPE: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticFit {
    pub intercept: f64,
    pub slope: f64,
    pub slope_se: f64,
    /// Two-sided Wald p-value for the slope.
    pub p: f64,
    pub iterations: usize,
    /// Gradient tolerance reached within the iteration cap.
    pub gradient_converged: bool,
    pub log_likelihood: f64,
}

impl LogisticFit {
    /// Converged and not flagged by the separation heuristic.
    pub fn converged(&self) -> bool {
        self.gradient_converged && self.slope.abs() <= SEPARATION_SLOPE
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaldTest {
    pub p: f64,
    pub converged: bool,
    /// Slope per standard deviation of the feature.
    pub slope: f64,
}

fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

/// log(1 + exp(eta)) without overflow.
fn softplus(eta: f64) -> f64 {
    if eta > 0.0 {
        eta + (-eta).exp().ln_1p()
    } else {
        eta.exp().ln_1p()
    }
}

fn log_likelihood(x: &[f64], y: &[f64], b0: f64, b1: f64) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let eta = b0 + b1 * xi;
            yi * eta - softplus(eta)
        })
        .sum()
}

/// Gradient and observed information of the log-likelihood.
fn score_and_information(x: &[f64], y: &[f64], b0: f64, b1: f64) -> ([f64; 2], [f64; 3]) {
    let mut g = [0.0; 2];
    let mut h = [0.0; 3]; // h00, h01, h11
    for (&xi, &yi) in x.iter().zip(y) {
        let mu = sigmoid(b0 + b1 * xi);
        let resid = yi - mu;
        let w = mu * (1.0 - mu);
        g[0] += resid;
        g[1] += resid * xi;
        h[0] += w;
        h[1] += w * xi;
        h[2] += w * xi * xi;
    }
    (g, h)
}

fn check_inputs(x: &[f64], y: &[u32]) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 3 {
        return Err(StatsError::TooFewObservations { n: x.len(), required: 3 });
    }
    check_finite(x)?;
    let labels = y
        .iter()
        .map(|&v| match v {
            0 | 1 => Ok(v as f64),
            other => Err(StatsError::NonBinaryLabel(other as f64)),
        })
        .collect::<Result<Vec<f64>>>()?;
    if labels.iter().all(|&v| v == labels[0]) {
        return Err(StatsError::SingleGroup);
    }
    if is_constant(x) {
        return Err(StatsError::ConstantInput);
    }
    Ok(labels)
}

/// Fits `label ~ intercept + slope * x` by Newton steps on the
/// log-likelihood (iteratively reweighted least squares).
///
/// Stops when the gradient norm drops below 1e-8 or after 25 iterations.
/// Steps that lower the likelihood are halved.
pub fn fit_logistic(x: &[f64], label: &[u32]) -> Result<LogisticFit> {
    let y = check_inputs(x, label)?;
    let ybar = mean(&y);
    let mut b0 = (ybar / (1.0 - ybar)).ln();
    let mut b1 = 0.0;
    let mut ll = log_likelihood(x, &y, b0, b1);
    let mut iterations = 0;
    let mut gradient_converged = false;

    loop {
        let (g, h) = score_and_information(x, &y, b0, b1);
        if g[0].hypot(g[1]) < GRADIENT_TOLERANCE {
            gradient_converged = true;
            break;
        }
        if iterations == MAX_ITERATIONS {
            break;
        }
        let det = h[0] * h[2] - h[1] * h[1];
        if !(det.is_finite() && det > 0.0) {
            break;
        }
        let step0 = (h[2] * g[0] - h[1] * g[1]) / det;
        let step1 = (h[0] * g[1] - h[1] * g[0]) / det;
        let mut scale = 1.0;
        let (mut n0, mut n1, mut nll);
        loop {
            n0 = b0 + scale * step0;
            n1 = b1 + scale * step1;
            nll = log_likelihood(x, &y, n0, n1);
            if nll >= ll - 1e-12 * ll.abs().max(1.0) || scale < 1e-10 {
                break;
            }
            scale *= 0.5;
        }
        b0 = n0;
        b1 = n1;
        ll = nll;
        iterations += 1;
    }

    let (_, h) = score_and_information(x, &y, b0, b1);
    let det = h[0] * h[2] - h[1] * h[1];
    let var_slope = if det > 0.0 { h[0] / det } else { f64::INFINITY };
    let slope_se = var_slope.sqrt();
    let p = if slope_se.is_finite() && slope_se > 0.0 {
        let z = b1 / slope_se;
        erfc(z.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(LogisticFit {
        intercept: b0,
        slope: b1,
        slope_se,
        p,
        iterations,
        gradient_converged,
        log_likelihood: ll,
    })
}

/// Wald significance of a feature as predictor of a binary label.
///
/// The feature is z-scored first; the Wald statistic is unchanged by
/// rescaling, and the separation check then applies per standard deviation.
pub fn logistic_wald_p(feature: &[f64], label: &[u32]) -> Result<WaldTest> {
    check_finite(feature)?;
    if feature.len() < 3 {
        return Err(StatsError::TooFewObservations { n: feature.len(), required: 3 });
    }
    if is_constant(feature) {
        return Err(StatsError::ConstantInput);
    }
    let m = mean(feature);
    let sd = (feature.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (feature.len() - 1) as f64).sqrt();
    if sd == 0.0 {
        return Err(StatsError::ConstantInput);
    }
    let z: Vec<f64> = feature.iter().map(|v| (v - m) / sd).collect();
    let fit = fit_logistic(&z, label)?;
    Ok(WaldTest { p: fit.p, converged: fit.converged(), slope: fit.slope })
}
