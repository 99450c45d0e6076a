//! Correlation-of-correlations studies: factor pairs within a domain,
//! explicit against implicit personas, and full against single-factor
//! personas.

use std::collections::BTreeMap;

use super::effects::{corpus_effects, corpus_label, FeatureSource};
use super::grid::{meta_cell, Cell, Grid};
use super::{AnalysisError, Result};
use crate::persona::{HumanFactor, PersonaMode, PersonaSet};
use crate::probe::Corpus;
use crate::stats::{correlate_effect_vectors, EffectTable, MetaCorrelation, MetaOptions};
use crate::task::Domain;

pub const BGT3_GRID: &str = "bgt3";
pub const IMPORTANCE_GRID: &str = "importance";

pub fn bgt2_grid_name(domain: Domain) -> String {
    format!("bgt2_{domain}")
}

/// Lower-triangular factor x factor panel for one domain. Each factor's
/// effects come from the corpus where only that factor was stated; BH runs
/// across the cells of the panel (ten with all five factors).
pub fn bgt2(domain: Domain, tables: &BTreeMap<HumanFactor, EffectTable>, opts: &MetaOptions, alpha: f64) -> Result<Grid> {
    let factors: Vec<HumanFactor> = tables.keys().copied().collect();
    if factors.len() < 2 {
        return Err(AnalysisError::MissingTable(format!("{domain} effects for at least two factors")));
    }
    let rows: Vec<String> = factors.iter().map(|f| f.abbreviation().to_string()).collect();
    let columns: Vec<String> = rows[..rows.len() - 1].to_vec();
    let mut cells = Vec::new();
    for (i, &fi) in factors.iter().enumerate() {
        for &fj in &factors[..i] {
            let outcome = correlate_effect_vectors(&tables[&fi], &tables[&fj], opts);
            cells.push(meta_cell(fi.abbreviation(), fj.abbreviation(), outcome));
        }
    }
    let mut grid = Grid::new(&bgt2_grid_name(domain), rows, columns, cells);
    grid.apply_bh(alpha)?;
    Ok(grid)
}

fn single_factor(corpus: &Corpus, mode: PersonaMode) -> Result<HumanFactor> {
    match corpus.meta.factors.as_slice() {
        [f] if corpus.meta.mode == mode => Ok(*f),
        _ => Err(AnalysisError::Precondition(format!("{} is not a single-factor {mode} corpus", corpus_label(corpus)))),
    }
}

/// [`bgt2`] straight from the explicit single-factor corpora of a domain.
pub fn bgt2_from_corpora(
    corpora: &[Corpus],
    personas: &PersonaSet,
    source: &FeatureSource,
    opts: &MetaOptions,
    alpha: f64,
) -> Result<Grid> {
    let domain = corpora.first().ok_or_else(|| AnalysisError::MissingTable("no corpora given".into()))?.meta.domain;
    let mut tables = BTreeMap::new();
    for corpus in corpora {
        if corpus.meta.domain != domain {
            return Err(AnalysisError::Precondition("bgt2 corpora must share one domain".into()));
        }
        let factor = single_factor(corpus, PersonaMode::Explicit)?;
        tables.insert(factor, corpus_effects(corpus, personas, factor, source, alpha)?);
    }
    bgt2(domain, &tables, opts, alpha)
}

/// Agreement between the factor's effects under explicit and implicit
/// personas answering the same question.
pub fn bgt3(
    explicit: &Corpus,
    implicit: &Corpus,
    factor: HumanFactor,
    personas: &PersonaSet,
    source: &FeatureSource,
    opts: &MetaOptions,
) -> Result<MetaCorrelation> {
    if !factor.supports_implicit() {
        return Err(AnalysisError::Unsupported(format!("{factor} has no implicit personas")));
    }
    if single_factor(explicit, PersonaMode::Explicit)? != factor || single_factor(implicit, PersonaMode::Implicit)? != factor {
        return Err(AnalysisError::Precondition(format!("bgt3 corpora must both be {factor} corpora")));
    }
    if explicit.meta.domain != implicit.meta.domain {
        return Err(AnalysisError::Precondition("bgt3 corpora must share one domain".into()));
    }
    let a = corpus_effects(explicit, personas, factor, source, 0.05)?;
    let b = corpus_effects(implicit, personas, factor, source, 0.05)?;
    Ok(correlate_effect_vectors(&a, &b, opts)?)
}

/// Agreement between the factor's effects when all five factors are stated
/// and when only that factor is.
pub fn importance(
    full: &Corpus,
    single: &Corpus,
    factor: HumanFactor,
    personas: &PersonaSet,
    source: &FeatureSource,
    opts: &MetaOptions,
) -> Result<MetaCorrelation> {
    if full.meta.mode != PersonaMode::Explicit || HumanFactor::ALL.iter().any(|f| !full.meta.factors.contains(f)) {
        return Err(AnalysisError::Precondition(format!("{} is not a full explicit persona corpus", corpus_label(full))));
    }
    if single_factor(single, PersonaMode::Explicit)? != factor || full.meta.domain != single.meta.domain {
        return Err(AnalysisError::Precondition(format!("single corpus must be the {factor} corpus of the same domain")));
    }
    let a = corpus_effects(full, personas, factor, source, 0.05)?;
    let b = corpus_effects(single, personas, factor, source, 0.05)?;
    Ok(correlate_effect_vectors(&a, &b, opts)?)
}

/// One (domain, factor) comparison of two effect tables.
pub struct CrossPair<'a> {
    pub domain: Domain,
    pub factor: HumanFactor,
    pub left: &'a EffectTable,
    pub right: &'a EffectTable,
}

fn domain_grid(name: &str, factors: &[HumanFactor], pairs: &[CrossPair<'_>], opts: &MetaOptions, alpha: f64) -> Result<Grid> {
    let rows: Vec<String> = Domain::ALL.iter().map(|d| d.title().to_string()).collect();
    let columns: Vec<String> = factors.iter().map(|f| f.title().to_string()).collect();
    let mut cells: Vec<Cell> = Vec::new();
    for pair in pairs {
        if !factors.contains(&pair.factor) {
            return Err(AnalysisError::Unsupported(format!("{} is not a column of the {name} grid", pair.factor)));
        }
        let outcome = correlate_effect_vectors(pair.left, pair.right, opts);
        cells.push(meta_cell(pair.domain.title(), pair.factor.title(), outcome));
    }
    let mut grid = Grid::new(name, rows, columns, cells);
    grid.apply_bh(alpha)?;
    grid.push_average_row();
    Ok(grid)
}

/// Domain x {age, gender, race} grid of explicit-vs-implicit agreement,
/// with BH across the grid and per-factor averages.
pub fn bgt3_grid(pairs: &[CrossPair<'_>], opts: &MetaOptions, alpha: f64) -> Result<Grid> {
    domain_grid(BGT3_GRID, &HumanFactor::IMPLICIT, pairs, opts, alpha)
}

/// Domain x factor grid of full-vs-single persona agreement, with BH
/// across the grid and per-factor averages.
pub fn importance_grid(pairs: &[CrossPair<'_>], opts: &MetaOptions, alpha: f64) -> Result<Grid> {
    domain_grid(IMPORTANCE_GRID, &HumanFactor::ALL, pairs, opts, alpha)
}
