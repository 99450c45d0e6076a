use std::collections::BTreeMap;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{pearson, EffectTable, Result, StatsError};

/// How the feature sets of two effect tables are matched up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Alignment {
    /// Features present in both tables.
    #[default]
    Intersection,
    /// Features present in either table; a missing effect counts as 0.
    UnionZeroFill,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct MetaOptions {
    pub alignment: Alignment,
    /// Restrict each table to its FDR-significant features.
    pub significant_only: bool,
    pub min_aligned: usize,
}

impl Default for MetaOptions {
    fn default() -> Self {
        MetaOptions { alignment: Alignment::Intersection, significant_only: false, min_aligned: 30 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetaCorrelation {
    pub r: f64,
    pub p: f64,
    pub aligned: usize,
}

/// Correlation between two tables' per-feature effect vectors.
pub fn correlate_effect_vectors(
    a: &EffectTable,
    b: &EffectTable,
    opts: &MetaOptions,
) -> Result<MetaCorrelation> {
    let effects = |t: &EffectTable| -> BTreeMap<String, f64> {
        t.results
            .iter()
            .filter(|r| !opts.significant_only || r.significant)
            .map(|r| (r.feature.clone(), r.effect))
            .collect()
    };
    let (ea, eb) = (effects(a), effects(b));
    let (xs, ys): (Vec<f64>, Vec<f64>) = match opts.alignment {
        Alignment::Intersection => ea
            .iter()
            .filter_map(|(f, &x)| eb.get(f).map(|&y| (x, y)))
            .unzip(),
        Alignment::UnionZeroFill => {
            let mut keys: Vec<&String> = ea.keys().chain(eb.keys()).collect();
            keys.sort();
            keys.dedup();
            keys.into_iter()
                .map(|f| (ea.get(f).copied().unwrap_or(0.0), eb.get(f).copied().unwrap_or(0.0)))
                .unzip()
        }
    };
    let required = opts.min_aligned.max(3);
    if xs.len() < required {
        return Err(StatsError::InsufficientOverlap { aligned: xs.len(), required });
    }
    let c = pearson(&xs, &ys)?;
    Ok(MetaCorrelation { r: c.r, p: c.p, aligned: xs.len() })
}
