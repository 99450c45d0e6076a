use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{bh_fdr, cohens_d, logistic_wald_p, pearson, Result, StatsError};
use crate::persona::{FactorKind, HumanFactor, PersonaMode};
use crate::task::Domain;

/// Effect of one feature before multiple-comparison correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureEffect {
    /// Pearson r for continuous factors, Cohen's d for binary ones.
    pub effect: f64,
    pub raw_p: f64,
    pub n: usize,
    /// Logistic fit status; `None` for continuous factors.
    pub converged: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    ConstantFeature,
    ConstantFactor,
    SingleGroup,
    ZeroPooledVariance,
    TooFewObservations,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EffectOutcome {
    Computed(FeatureEffect),
    Skipped(SkipReason),
}

impl EffectOutcome {
    pub fn computed(&self) -> Option<&FeatureEffect> {
        match self {
            EffectOutcome::Computed(e) => Some(e),
            EffectOutcome::Skipped(_) => None,
        }
    }
}

/// Correlates one feature column with factor values.
///
/// Continuous factors use Pearson r with its t-test; binary factors use
/// Cohen's d with a logistic-regression Wald p. Degenerate inputs produce
/// [`EffectOutcome::Skipped`] rather than an invented p-value.
pub fn effect_with_significance(
    feature: &[f64],
    factor_values: &[f64],
    kind: FactorKind,
) -> Result<EffectOutcome> {
    if feature.len() != factor_values.len() {
        return Err(StatsError::LengthMismatch { left: feature.len(), right: factor_values.len() });
    }
    let skip = |e: StatsError| -> Result<EffectOutcome> {
        let reason = match e {
            StatsError::ConstantInput => {
                if super::is_constant(feature) {
                    SkipReason::ConstantFeature
                } else {
                    SkipReason::ConstantFactor
                }
            }
            StatsError::SingleGroup => SkipReason::SingleGroup,
            StatsError::ZeroPooledVariance => SkipReason::ZeroPooledVariance,
            StatsError::TooFewObservations { .. } => SkipReason::TooFewObservations,
            other => return Err(other),
        };
        Ok(EffectOutcome::Skipped(reason))
    };
    let n = feature.len();
    match kind {
        FactorKind::Continuous => match pearson(feature, factor_values) {
            Ok(c) => Ok(EffectOutcome::Computed(FeatureEffect {
                effect: c.r,
                raw_p: c.p,
                n,
                converged: None,
            })),
            Err(e) => skip(e),
        },
        FactorKind::Binary => {
            let labels = factor_values
                .iter()
                .map(|&v| {
                    if v == 0.0 || v == 1.0 {
                        Ok(v as u32)
                    } else {
                        Err(StatsError::NonBinaryLabel(v))
                    }
                })
                .collect::<Result<Vec<u32>>>()?;
            if super::is_constant(feature) {
                return Ok(EffectOutcome::Skipped(SkipReason::ConstantFeature));
            }
            let d = match cohens_d(feature, &labels) {
                Ok(d) => d,
                Err(e) => return skip(e),
            };
            match logistic_wald_p(feature, &labels) {
                Ok(w) => Ok(EffectOutcome::Computed(FeatureEffect {
                    effect: d,
                    raw_p: w.p,
                    n,
                    converged: Some(w.converged),
                })),
                Err(e) => skip(e),
            }
        }
    }
}

/// Per-feature effect after BH correction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectResult {
    pub feature: String,
    pub effect: f64,
    pub raw_p: f64,
    pub adjusted_p: f64,
    pub significant: bool,
    pub n: usize,
    pub converged: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TableMeta {
    pub label: String,
    pub factor: Option<HumanFactor>,
    pub domain: Option<Domain>,
    pub mode: Option<PersonaMode>,
}

/// Effects of every tested feature for one (corpus, factor) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectTable {
    pub meta: TableMeta,
    pub alpha: f64,
    /// Number of tested features (the m of the correction).
    pub vocabulary_size: usize,
    /// Sorted by feature id.
    pub results: Vec<EffectResult>,
    pub skipped: Vec<(String, SkipReason)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    feature: String,
    effect: f64,
    raw_p: f64,
    adjusted_p: f64,
    significant: bool,
    n: usize,
    converged: Option<bool>,
}

impl EffectTable {
    /// Applies BH across the computed outcomes.
    pub fn from_outcomes(
        meta: TableMeta,
        alpha: f64,
        outcomes: Vec<(String, EffectOutcome)>,
    ) -> Result<Self> {
        let mut computed = Vec::new();
        let mut skipped = Vec::new();
        for (feature, outcome) in outcomes {
            match outcome {
                EffectOutcome::Computed(e) => computed.push((feature, e)),
                EffectOutcome::Skipped(r) => skipped.push((feature, r)),
            }
        }
        computed.sort_by(|a, b| a.0.cmp(&b.0));
        skipped.sort_by(|a, b| a.0.cmp(&b.0));
        let raw: Vec<f64> = computed.iter().map(|(_, e)| e.raw_p).collect();
        let bh = bh_fdr(&raw, alpha)?;
        let results = computed
            .into_iter()
            .enumerate()
            .map(|(i, (feature, e))| EffectResult {
                feature,
                effect: e.effect,
                raw_p: e.raw_p,
                adjusted_p: bh.adjusted[i],
                significant: bh.reject[i],
                n: e.n,
                converged: e.converged,
            })
            .collect::<Vec<_>>();
        Ok(EffectTable { meta, alpha, vocabulary_size: results.len(), results, skipped })
    }

    pub fn get(&self, feature: &str) -> Option<&EffectResult> {
        self.results
            .binary_search_by(|r| r.feature.as_str().cmp(feature))
            .ok()
            .map(|i| &self.results[i])
    }

    /// Significant features ordered by decreasing |effect|.
    pub fn significant(&self) -> Vec<&EffectResult> {
        let mut sig: Vec<&EffectResult> = self.results.iter().filter(|r| r.significant).collect();
        sig.sort_by(|a, b| {
            b.effect.abs().total_cmp(&a.effect.abs()).then_with(|| a.feature.cmp(&b.feature))
        });
        sig
    }

    /// CSV with header `feature,effect,raw_p,adjusted_p,significant,n,converged`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.results.is_empty() {
            w.write_record(["feature", "effect", "raw_p", "adjusted_p", "significant", "n", "converged"])?;
        }
        for r in &self.results {
            w.serialize(CsvRow {
                feature: r.feature.clone(),
                effect: r.effect,
                raw_p: r.raw_p,
                adjusted_p: r.adjusted_p,
                significant: r.significant,
                n: r.n,
                converged: r.converged,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads rows written by [`EffectTable::write_csv`].
    pub fn read_csv_rows<R: Read>(input: R) -> csv::Result<Vec<EffectResult>> {
        let mut rdr = csv::Reader::from_reader(input);
        rdr.deserialize::<CsvRow>()
            .map(|row| {
                row.map(|r| EffectResult {
                    feature: r.feature,
                    effect: r.effect,
                    raw_p: r.raw_p,
                    adjusted_p: r.adjusted_p,
                    significant: r.significant,
                    n: r.n,
                    converged: r.converged,
                })
            })
            .collect()
    }
}
