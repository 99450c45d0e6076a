use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::stats::{EffectResult, EffectTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyBucket {
    Low,
    Moderate,
    High,
}

impl FrequencyBucket {
    pub fn color(self) -> &'static str {
        match self {
            FrequencyBucket::Low => "#8c8c8c",
            FrequencyBucket::Moderate => "#1f5fbf",
            FrequencyBucket::High => "#d62728",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudEntry {
    pub term: String,
    /// |effect| over the largest |effect| in the same cloud.
    pub size: f64,
    pub bucket: FrequencyBucket,
    pub sign: Sign,
    pub effect: f64,
}

/// Terms associated with the positive and the negative factor level.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CloudData {
    pub positive: Vec<CloudEntry>,
    pub negative: Vec<CloudEntry>,
}

impl CloudData {
    pub fn is_empty(&self) -> bool {
        self.positive.is_empty() && self.negative.is_empty()
    }
}

/// Frequency tercile of each significant feature, ranked over the whole
/// significant set (ties broken by term).
fn terciles(significant: &[&EffectResult], frequencies: &BTreeMap<String, u64>) -> BTreeMap<String, FrequencyBucket> {
    let mut ranked: Vec<(u64, &str)> = significant
        .iter()
        .map(|r| (frequencies.get(&r.feature).copied().unwrap_or(0), r.feature.as_str()))
        .collect();
    ranked.sort();
    let n = ranked.len();
    ranked
        .into_iter()
        .enumerate()
        .map(|(i, (_, term))| {
            let bucket = match 3 * i / n {
                0 => FrequencyBucket::Low,
                1 => FrequencyBucket::Moderate,
                _ => FrequencyBucket::High,
            };
            (term.to_string(), bucket)
        })
        .collect()
}

/// Significant features split by sign, each side truncated to `max_terms`
/// by |effect| and sized relative to its largest term.
///
/// Features absent from `frequencies` count as frequency 0.
pub fn wordcloud_data(table: &EffectTable, frequencies: &BTreeMap<String, u64>, max_terms: usize) -> CloudData {
    let significant = table.significant();
    if significant.is_empty() {
        return CloudData::default();
    }
    let buckets = terciles(&significant, frequencies);
    let side = |sign: Sign| -> Vec<CloudEntry> {
        let picked: Vec<&&EffectResult> = significant
            .iter()
            .filter(|r| match sign {
                Sign::Positive => r.effect > 0.0,
                Sign::Negative => r.effect < 0.0,
            })
            .take(max_terms)
            .collect();
        let top = picked.first().map_or(1.0, |r| r.effect.abs());
        picked
            .into_iter()
            .map(|r| CloudEntry {
                term: r.feature.clone(),
                size: r.effect.abs() / top,
                bucket: buckets[&r.feature],
                sign,
                effect: r.effect,
            })
            .collect()
    };
    CloudData { positive: side(Sign::Positive), negative: side(Sign::Negative) }
}
