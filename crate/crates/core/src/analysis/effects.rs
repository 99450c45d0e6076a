use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{Cell, Grid};
use super::{AnalysisError, Result};
use crate::features::{extract_ngrams, score_lexicon, FeatureMatrix, Lexicon, NgramConfig};
use crate::persona::{HumanFactor, PersonaSet};
use crate::probe::{Corpus, ValidationScores};
use crate::stats::{effect_with_significance, pearson, Correlation, EffectResult, EffectTable, StatsError, TableMeta};
use crate::task::Domain;

/// How documents are turned into features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeatureSource {
    Ngrams(NgramConfig),
    Lexicon(Lexicon),
}

impl Default for FeatureSource {
    fn default() -> Self {
        FeatureSource::Ngrams(NgramConfig::default())
    }
}

impl FeatureSource {
    pub fn extract(&self, docs: &[(u64, &str)]) -> Result<FeatureMatrix> {
        Ok(match self {
            FeatureSource::Ngrams(cfg) => extract_ngrams(docs, cfg)?,
            FeatureSource::Lexicon(lex) => score_lexicon(docs, lex)?,
        })
    }
}

/// Factor value of each listed persona (years, or 1/0).
pub fn factor_values(personas: &PersonaSet, ids: &[u64], factor: HumanFactor) -> Result<Vec<f64>> {
    ids.iter()
        .map(|&id| {
            let persona = personas.get(id).ok_or(AnalysisError::MissingPersona(id))?;
            persona
                .value(factor)
                .map(f64::from)
                .ok_or(AnalysisError::MissingFactor { persona: id, factor })
        })
        .collect()
}

/// Effect of `factor` on every feature column, BH-corrected across the
/// vocabulary.
pub fn factor_effects(
    matrix: &FeatureMatrix,
    personas: &PersonaSet,
    factor: HumanFactor,
    meta: TableMeta,
    alpha: f64,
) -> Result<EffectTable> {
    let values = factor_values(personas, matrix.doc_ids(), factor)?;
    let kind = factor.kind();
    let outcomes = (0..matrix.n_features())
        .into_par_iter()
        .map(|j| {
            let column = matrix.dense_column(j);
            effect_with_significance(&column, &values, kind).map(|o| (matrix.features()[j].id.clone(), o))
        })
        .collect::<std::result::Result<Vec<_>, StatsError>>()?;
    Ok(EffectTable::from_outcomes(meta, alpha, outcomes)?)
}

/// Extracts features from a corpus and correlates them with `factor`.
pub fn corpus_effects(
    corpus: &Corpus,
    personas: &PersonaSet,
    factor: HumanFactor,
    source: &FeatureSource,
    alpha: f64,
) -> Result<EffectTable> {
    let matrix = corpus_matrix(corpus, source)?;
    factor_effects(&matrix, personas, factor, table_meta(corpus, factor), alpha)
}

fn corpus_matrix(corpus: &Corpus, source: &FeatureSource) -> Result<FeatureMatrix> {
    let docs = corpus.documents();
    if docs.is_empty() {
        return Err(AnalysisError::EmptyCorpus(corpus_label(corpus)));
    }
    source.extract(&docs)
}

fn table_meta(corpus: &Corpus, factor: HumanFactor) -> TableMeta {
    TableMeta {
        label: format!("{}:{}", corpus_label(corpus), factor),
        factor: Some(factor),
        domain: Some(corpus.meta.domain),
        mode: Some(corpus.meta.mode),
    }
}

/// `domain/mode/factor+factor`, naming the corpus in messages and files.
pub fn corpus_label(corpus: &Corpus) -> String {
    let factors: Vec<&str> = corpus.meta.factors.iter().map(|f| f.as_str()).collect();
    format!("{}/{}/{}", corpus.meta.domain, corpus.meta.mode, factors.join("+"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bgt1 {
    pub full: EffectTable,
    /// Significant features by decreasing |effect|.
    pub significant: Vec<EffectResult>,
    /// Corpus-wide occurrence count of each significant feature.
    pub frequencies: BTreeMap<String, u64>,
}

/// Differential language analysis of one factor on its own domain.
pub fn bgt1(corpus: &Corpus, personas: &PersonaSet, factor: HumanFactor, source: &FeatureSource, alpha: f64) -> Result<Bgt1> {
    let expected = Domain::for_factor(factor);
    if corpus.meta.domain != expected {
        return Err(AnalysisError::Precondition(format!(
            "{factor} is analysed on the {expected} corpus, got {}",
            corpus.meta.domain
        )));
    }
    let matrix = corpus_matrix(corpus, source)?;
    let full = factor_effects(&matrix, personas, factor, table_meta(corpus, factor), alpha)?;
    if full.results.is_empty() {
        return Err(AnalysisError::EmptyVocabulary(corpus_label(corpus)));
    }
    let significant: Vec<EffectResult> = full.significant().into_iter().cloned().collect();
    let frequencies = significant
        .iter()
        .filter_map(|r| matrix.feature_index(&r.feature).map(|j| (r.feature.clone(), matrix.features()[j].corpus_count)))
        .collect();
    Ok(Bgt1 { full, significant, frequencies })
}

/// Correlates judge scores with the factor values of the personas who
/// wrote the judged documents.
pub fn bgt1_validation(scores: &ValidationScores, personas: &PersonaSet, factor: HumanFactor) -> Result<Correlation> {
    let present = scores.present();
    if present.is_empty() {
        return Err(AnalysisError::NoSignal("every judgment is missing".into()));
    }
    let ids: Vec<u64> = present.iter().map(|p| p.0).collect();
    let values = factor_values(personas, &ids, factor)?;
    let judged: Vec<f64> = present.iter().map(|p| p.1 as f64).collect();
    match pearson(&judged, &values) {
        Ok(c) => Ok(c),
        Err(StatsError::ConstantInput) => Err(AnalysisError::NoSignal("judge scores or factor values are constant".into())),
        Err(e) => Err(e.into()),
    }
}

pub const VALIDATION_GRID: &str = "validation";
pub const VALIDATION_COLUMN: &str = "Judge r";

/// Domain x judge-correlation grid, BH-corrected across domains. Domains
/// without signal keep an empty cell with the reason.
pub fn validation_grid(outcomes: Vec<(Domain, Result<Correlation>)>, alpha: f64) -> Result<Grid> {
    let mut cells = Vec::new();
    for (domain, outcome) in outcomes {
        cells.push(match outcome {
            Ok(c) => Cell::tested(domain.title(), VALIDATION_COLUMN, c.r, c.p, c.n),
            Err(AnalysisError::NoSignal(why)) => Cell::empty(domain.title(), VALIDATION_COLUMN, Some(&why)),
            Err(e) => return Err(e),
        });
    }
    let rows = Domain::ALL.iter().map(|d| d.title().to_string()).collect();
    let mut grid = Grid::new(VALIDATION_GRID, rows, vec![VALIDATION_COLUMN.to_string()], cells);
    grid.apply_bh(alpha)?;
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persona::{sample_population, PersonaMode, PopulationSpec};
    use crate::probe::{run_generation, BeliefQuestion, CorpusMeta, Prober, ResponseCache, RetryPolicy, ScoreRecord, SyntheticModel, ValidationMeta};

    fn prober(model: SyntheticModel) -> Prober {
        Prober::new(Box::new(model), ResponseCache::in_memory(), RetryPolicy::default(), 4, 0).unwrap()
    }

    #[test]
    fn injected_token_is_recovered() {
        let personas = sample_population(&PopulationSpec::default(), 3).unwrap();
        let model = SyntheticModel::default().with_bias("caregivers", HumanFactor::Gender, 0.2, 0.6);
        let q = BeliefQuestion::bundled_for(Domain::Parenting);
        let corpus = run_generation(&prober(model), &personas, &q, PersonaMode::Explicit, &[HumanFactor::Gender], "").unwrap();
        let out = bgt1(&corpus, &personas, HumanFactor::Gender, &FeatureSource::default(), 0.05).unwrap();
        let hit = out.full.get("caregivers").unwrap();
        assert!(hit.significant && hit.effect > 0.5, "{hit:?}");
        assert_eq!(out.significant[0].feature, "caregivers");
    }

    #[test]
    fn wrong_domain_rejected() {
        let personas = sample_population(&PopulationSpec { size: 20, ..Default::default() }, 3).unwrap();
        let q = BeliefQuestion::bundled_for(Domain::Policing);
        let corpus = run_generation(&prober(SyntheticModel::default()), &personas, &q, PersonaMode::Explicit, &[HumanFactor::Gender], "").unwrap();
        assert!(matches!(bgt1(&corpus, &personas, HumanFactor::Gender, &FeatureSource::default(), 0.05), Err(AnalysisError::Precondition(_))));
    }

    fn scores(values: &[(u64, Option<i8>)]) -> ValidationScores {
        ValidationScores {
            meta: ValidationMeta {
                question: "q".into(),
                domain: Domain::Immigration,
                mode: PersonaMode::Explicit,
                factors: vec![HumanFactor::PoliticalIdeology],
                judge: "j".into(),
                seed: 0,
            },
            scores: values.iter().map(|&(persona_id, score)| ScoreRecord { persona_id, score }).collect(),
        }
    }

    #[test]
    fn validation_correlation_and_no_signal() {
        let personas = sample_population(&PopulationSpec { size: 50, ..Default::default() }, 1).unwrap();
        let aligned: Vec<(u64, Option<i8>)> = personas
            .iter()
            .map(|p| (p.id, Some(if p.value(HumanFactor::PoliticalIdeology) == Some(1) { 1 } else { 0 })))
            .collect();
        let c = bgt1_validation(&scores(&aligned), &personas, HumanFactor::PoliticalIdeology).unwrap();
        assert!((c.r - 1.0).abs() < 1e-12);
        let flat: Vec<(u64, Option<i8>)> = personas.iter().map(|p| (p.id, Some(0))).collect();
        assert!(matches!(bgt1_validation(&scores(&flat), &personas, HumanFactor::PoliticalIdeology), Err(AnalysisError::NoSignal(_))));
        let none: Vec<(u64, Option<i8>)> = personas.iter().map(|p| (p.id, None)).collect();
        assert!(matches!(bgt1_validation(&scores(&none), &personas, HumanFactor::PoliticalIdeology), Err(AnalysisError::NoSignal(_))));
    }

    #[test]
    fn unknown_persona_is_an_error() {
        let personas = sample_population(&PopulationSpec { size: 5, ..Default::default() }, 1).unwrap();
        let corpus = Corpus {
            meta: CorpusMeta {
                question: "q".into(),
                domain: Domain::Parenting,
                mode: PersonaMode::Explicit,
                factors: vec![],
                backend: "b".into(),
                seed: 0,
            },
            records: vec![],
        };
        assert!(matches!(corpus_effects(&corpus, &personas, HumanFactor::Gender, &FeatureSource::default(), 0.05), Err(AnalysisError::EmptyCorpus(_))));
        assert!(matches!(factor_values(&personas, &[999], HumanFactor::Age), Err(AnalysisError::MissingPersona(999))));
    }
}
