use super::{Result, StatsError};

#[derive(Debug, Clone, PartialEq)]
pub struct BhResult {
    pub reject: Vec<bool>,
    /// Step-up adjusted p-values, in input order.
    pub adjusted: Vec<f64>,
}

impl BhResult {
    pub fn rejections(&self) -> usize {
        self.reject.iter().filter(|&&r| r).count()
    }
}

/// Benjamini-Hochberg step-up procedure.
///
/// With p sorted ascending, rejects ranks `1..=k` for the largest `k` with
/// `p(k) <= k * alpha / m`. Adjusted values are `min_{j >= k} p(j) m / j`
/// capped at 1.
pub fn bh_fdr(raw_p: &[f64], alpha: f64) -> Result<BhResult> {
    if let Some(&bad) = raw_p.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(StatsError::InvalidPValue(bad));
    }
    let m = raw_p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| raw_p[a].total_cmp(&raw_p[b]).then(a.cmp(&b)));

    let mut cutoff = 0;
    for (rank0, &i) in order.iter().enumerate() {
        let k = rank0 + 1;
        if raw_p[i] <= k as f64 * alpha / m as f64 {
            cutoff = k;
        }
    }

    let mut reject = vec![false; m];
    for &i in &order[..cutoff] {
        reject[i] = true;
    }

    let mut adjusted = vec![0.0; m];
    let mut running = 1.0f64;
    for (rank0, &i) in order.iter().enumerate().rev() {
        let k = rank0 + 1;
        running = running.min(raw_p[i] * (m as f64 / k as f64));
        adjusted[i] = running.min(1.0);
    }
    Ok(BhResult { reject, adjusted })
}
