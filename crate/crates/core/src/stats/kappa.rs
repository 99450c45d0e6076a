use serde::{Deserialize, Serialize};

use super::{Result, StatsError};

/// Fleiss' kappa for an items x raters matrix of category codes.
///
/// Returns `Ok(None)` when chance agreement is 1 (every rating falls in a
/// single category) and kappa is undefined.
pub fn fleiss_kappa(ratings: &[Vec<u32>]) -> Result<Option<f64>> {
    let items = ratings.len();
    let raters = ratings.first().map_or(0, Vec::len);
    if items == 0 || raters < 2 {
        return Err(StatsError::TooFewRaters);
    }
    if ratings.iter().any(|row| row.len() != raters) {
        return Err(StatsError::RaggedRatings);
    }
    let mut categories: Vec<u32> = ratings.iter().flatten().copied().collect();
    categories.sort_unstable();
    categories.dedup();
    if categories.len() < 2 {
        return Ok(None);
    }
    let n = raters as f64;
    let mut totals = vec![0usize; categories.len()];
    let mut agreement = 0.0;
    for row in ratings {
        let mut counts = vec![0usize; categories.len()];
        for v in row {
            let j = categories.binary_search(v).expect("category collected above");
            counts[j] += 1;
        }
        let pairs: usize = counts.iter().map(|&c| c * c.saturating_sub(1)).sum();
        agreement += pairs as f64 / (n * (n - 1.0));
        for (t, c) in totals.iter_mut().zip(&counts) {
            *t += c;
        }
    }
    let p_bar = agreement / items as f64;
    let total = (items * raters) as f64;
    let p_e: f64 = totals.iter().map(|&t| (t as f64 / total).powi(2)).sum();
    Ok(Some((p_bar - p_e) / (1.0 - p_e)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairwiseKappa {
    pub mean: f64,
    pub defined_pairs: usize,
    pub total_pairs: usize,
}

/// Kappa of two raters over the items both rated; `None` when undefined.
fn two_rater_kappa(a: &[Option<u8>], b: &[Option<u8>]) -> Option<f64> {
    let mut counts = [0u32; 256];
    let mut items = 0u32;
    let mut agree = 0u32;
    let mut used = [0u8; 256];
    let mut n_used = 0usize;
    for (x, y) in a.iter().zip(b) {
        let (Some(x), Some(y)) = (x, y) else { continue };
        items += 1;
        agree += u32::from(x == y);
        for &c in [x, y] {
            if counts[c as usize] == 0 {
                used[n_used] = c;
                n_used += 1;
            }
            counts[c as usize] += 1;
        }
    }
    if items == 0 || n_used < 2 {
        return None;
    }
    let total = 2.0 * items as f64;
    let p_e: f64 = used[..n_used].iter().map(|&c| (counts[c as usize] as f64 / total).powi(2)).sum();
    let p_bar = agree as f64 / items as f64;
    Some((p_bar - p_e) / (1.0 - p_e))
}

/// Mean Fleiss kappa over every (row of `a`, row of `b`) rater pair.
///
/// Items missing in either row are dropped for that pair; pairs with
/// undefined kappa are excluded from the mean and counted.
pub fn average_pairwise_kappa(a: &[Vec<Option<u8>>], b: &[Vec<Option<u8>>]) -> Result<PairwiseKappa> {
    let mut sum = 0.0;
    let mut defined = 0usize;
    for ra in a {
        for rb in b {
            if ra.len() != rb.len() {
                return Err(StatsError::RaggedRatings);
            }
            if let Some(k) = two_rater_kappa(ra, rb) {
                sum += k;
                defined += 1;
            }
        }
    }
    let total_pairs = a.len() * b.len();
    if defined == 0 {
        return Err(StatsError::NoDefinedPairs { pairs: total_pairs });
    }
    Ok(PairwiseKappa { mean: sum / defined as f64, defined_pairs: defined, total_pairs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_example() {
        let m = vec![vec![1, 1], vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]];
        let k = fleiss_kappa(&m).unwrap().unwrap();
        assert!((k - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_and_undefined() {
        let perfect = vec![vec![1, 1, 1], vec![0, 0, 0], vec![2, 2, 2]];
        assert_eq!(fleiss_kappa(&perfect).unwrap(), Some(1.0));
        let single = vec![vec![3, 3], vec![3, 3]];
        assert_eq!(fleiss_kappa(&single).unwrap(), None);
        assert_eq!(fleiss_kappa(&[vec![1]]), Err(StatsError::TooFewRaters));
        assert_eq!(fleiss_kappa(&[vec![1, 0], vec![1]]), Err(StatsError::RaggedRatings));
    }

    #[test]
    fn pairwise_matches_generic_kappa() {
        let a = vec![
            vec![Some(1), Some(0), Some(1), Some(1), Some(0)],
            vec![Some(0), Some(0), None, Some(1), Some(1)],
        ];
        let b = vec![vec![Some(1), Some(1), Some(1), Some(0), Some(0)]];
        let res = average_pairwise_kappa(&a, &b).unwrap();
        let generic = |x: &[Option<u8>], y: &[Option<u8>]| {
            let m: Vec<Vec<u32>> = x
                .iter()
                .zip(y)
                .filter_map(|(p, q)| Some(vec![(*p)? as u32, (*q)? as u32]))
                .collect();
            fleiss_kappa(&m).unwrap().unwrap()
        };
        let expect = (generic(&a[0], &b[0]) + generic(&a[1], &b[0])) / 2.0;
        assert!((res.mean - expect).abs() < 1e-12);
        assert_eq!(res.defined_pairs, 2);
    }

    #[test]
    fn constant_responders_have_no_defined_pairs() {
        let a = vec![vec![Some(1); 5]; 3];
        let err = average_pairwise_kappa(&a, &a).unwrap_err();
        assert_eq!(err, StatsError::NoDefinedPairs { pairs: 9 });
    }

    #[test]
    fn self_consistent_raters_score_one_with_themselves() {
        let row = vec![Some(1), Some(0), Some(1), Some(0), Some(0)];
        let res = average_pairwise_kappa(&[row.clone()], &[row]).unwrap();
        assert_eq!(res.mean, 1.0);
    }
}
