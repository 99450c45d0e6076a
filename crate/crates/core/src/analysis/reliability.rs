use super::grid::{Cell, Grid};
use super::{AnalysisError, Result};
use crate::persona::{HumanFactor, Persona, PersonaSet};
use crate::probe::{AnnotationRow, AnnotationTable};
use crate::stats::{average_pairwise_kappa, PairwiseKappa, StatsError};
use crate::task::Construct;

pub const RELIABILITY_GRID: &str = "reliability";

/// The offensiveness vignette's grid is the headline one; others carry a suffix.
pub fn reliability_grid_name(construct: Construct) -> String {
    match construct {
        Construct::Offensive => RELIABILITY_GRID.to_string(),
        other => format!("{RELIABILITY_GRID}_{other}"),
    }
}

/// Subset of raters a reliability row is computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PersonaType {
    All,
    Label { factor: HumanFactor, value: u32 },
}

impl PersonaType {
    pub const ROWS: [PersonaType; 9] = [
        PersonaType::All,
        PersonaType::Label { factor: HumanFactor::Race, value: 1 },
        PersonaType::Label { factor: HumanFactor::Race, value: 0 },
        PersonaType::Label { factor: HumanFactor::Gender, value: 1 },
        PersonaType::Label { factor: HumanFactor::Gender, value: 0 },
        PersonaType::Label { factor: HumanFactor::PoliticalIdeology, value: 1 },
        PersonaType::Label { factor: HumanFactor::PoliticalIdeology, value: 0 },
        PersonaType::Label { factor: HumanFactor::SubstanceUse, value: 1 },
        PersonaType::Label { factor: HumanFactor::SubstanceUse, value: 0 },
    ];

    pub fn title(self) -> &'static str {
        match self {
            PersonaType::All => "All",
            PersonaType::Label { factor, value } => match (factor, value) {
                (HumanFactor::Race, 1) => "Black",
                (HumanFactor::Race, _) => "White",
                (HumanFactor::Gender, 1) => "Female",
                (HumanFactor::Gender, _) => "Male",
                (HumanFactor::PoliticalIdeology, 1) => "Conservative",
                (HumanFactor::PoliticalIdeology, _) => "Liberal",
                (HumanFactor::SubstanceUse, 1) => "Uses Substances",
                (HumanFactor::SubstanceUse, _) => "No Substances",
                (HumanFactor::Age, _) => "Age",
            },
        }
    }

    pub fn factor(self) -> Option<HumanFactor> {
        match self {
            PersonaType::All => None,
            PersonaType::Label { factor, .. } => Some(factor),
        }
    }

    pub fn matches(self, persona: &Persona) -> bool {
        match self {
            PersonaType::All => true,
            PersonaType::Label { factor, value } => persona.value(factor) == Some(value),
        }
    }
}

fn select<'a>(tables: &[&'a AnnotationTable], personas: &PersonaSet, who: PersonaType) -> Vec<&'a AnnotationRow> {
    tables
        .iter()
        .flat_map(|t| &t.rows)
        .filter(|r| personas.get(r.persona_id).is_some_and(|p| who.matches(p)))
        .collect()
}

/// Mean kappa over every (rater in A, rater in B) pair restricted to one
/// persona type.
pub fn reliability(
    a: &AnnotationTable,
    personas_a: &PersonaSet,
    b: &AnnotationTable,
    personas_b: &PersonaSet,
    who: PersonaType,
) -> Result<PairwiseKappa> {
    let ra = select(&[a], personas_a, who);
    let rb = select(&[b], personas_b, who);
    kappa_between(&ra, &rb, who)
}

fn kappa_between(ra: &[&AnnotationRow], rb: &[&AnnotationRow], who: PersonaType) -> Result<PairwiseKappa> {
    if ra.is_empty() || rb.is_empty() {
        return Err(AnalysisError::EmptySubset(who.title().to_string()));
    }
    let la: Vec<Vec<Option<u8>>> = ra.iter().map(|r| r.labels.clone()).collect();
    let lb: Vec<Vec<Option<u8>>> = rb.iter().map(|r| r.labels.clone()).collect();
    Ok(average_pairwise_kappa(&la, &lb)?)
}

/// Raters of one kind (human, explicit or implicit) and their tables.
pub struct RaterSource<'a> {
    pub name: &'a str,
    pub tables: &'a [AnnotationTable],
    pub personas: &'a PersonaSet,
}

impl RaterSource<'_> {
    /// Tables for the row's factor; all tables when the row has no factor
    /// or the source has none for it.
    fn tables_for(&self, construct: Construct, who: PersonaType) -> Vec<&AnnotationTable> {
        let of_construct: Vec<&AnnotationTable> = self.tables.iter().filter(|t| t.meta.construct == construct).collect();
        let specific: Vec<&AnnotationTable> = match who.factor() {
            Some(f) => of_construct.iter().copied().filter(|t| t.meta.factors == [f]).collect(),
            None => Vec::new(),
        };
        if specific.is_empty() {
            of_construct
        } else {
            specific
        }
    }
}

/// Persona type x source pair grid of mean pairwise kappas.
///
/// Cells with no raters on one side, or no pair with a defined kappa, stay
/// empty.
pub fn reliability_grid(sources: &[RaterSource<'_>], construct: Construct) -> Result<Grid> {
    let rows: Vec<String> = PersonaType::ROWS.iter().map(|w| w.title().to_string()).collect();
    let mut columns = Vec::new();
    let mut cells = Vec::new();
    for (i, a) in sources.iter().enumerate() {
        for b in &sources[i + 1..] {
            let column = format!("{} vs. {}", a.name, b.name);
            for who in PersonaType::ROWS {
                let ra = select(&a.tables_for(construct, who), a.personas, who);
                let rb = select(&b.tables_for(construct, who), b.personas, who);
                cells.push(match kappa_between(&ra, &rb, who) {
                    Ok(k) => Cell { note: Some(format!("{} of {} pairs defined", k.defined_pairs, k.total_pairs)), ..Cell::value(who.title(), &column, k.mean, Some(k.defined_pairs)) },
                    Err(AnalysisError::EmptySubset(_)) => Cell::empty(who.title(), &column, Some("no raters")),
                    Err(AnalysisError::Stats(e @ StatsError::NoDefinedPairs { .. })) => Cell::empty(who.title(), &column, Some(&e.to_string())),
                    Err(e) => return Err(e),
                });
            }
            columns.push(column);
        }
    }
    Ok(Grid::new(&reliability_grid_name(construct), rows, columns, cells))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persona::{sample_population, PersonaMode, PopulationSpec};
    use crate::probe::AnnotationMeta;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_table(personas: &PersonaSet, factor: HumanFactor, seed: u64) -> AnnotationTable {
        random_items(personas, factor, seed, 5)
    }

    fn random_items(personas: &PersonaSet, factor: HumanFactor, seed: u64, items: usize) -> AnnotationTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        AnnotationTable {
            meta: AnnotationMeta {
                vignette: "v".into(),
                construct: Construct::Offensive,
                mode: PersonaMode::Explicit,
                factors: vec![factor],
                backend: "b".into(),
                seed,
            },
            rows: personas
                .iter()
                .map(|p| AnnotationRow { persona_id: p.id, labels: (0..items).map(|_| Some(rng.random_range(0..2u8))).collect() })
                .collect(),
        }
    }

    // Two independent uniform raters over n items: E[kappa] is about -1/(2n - 1),
    // which vanishes as n grows.
    #[test]
    fn random_raters_average_near_zero() {
        let personas = sample_population(&PopulationSpec { size: 120, ..Default::default() }, 0).unwrap();
        for items in [5usize, 400] {
            let a = random_items(&personas, HumanFactor::Gender, 1, items);
            let b = random_items(&personas, HumanFactor::Gender, 2, items);
            let k = reliability(&a, &personas, &b, &personas, PersonaType::All).unwrap();
            let expected = -1.0 / (2.0 * items as f64 - 1.0);
            assert!((k.mean - expected).abs() < 0.02, "{items}: {k:?}");
        }
    }

    #[test]
    fn self_comparison_exceeds_random() {
        let personas = sample_population(&PopulationSpec { size: 60, ..Default::default() }, 0).unwrap();
        let a = random_table(&personas, HumanFactor::Gender, 1);
        let same = reliability(&a, &personas, &a, &personas, PersonaType::All).unwrap();
        let other = reliability(&a, &personas, &random_table(&personas, HumanFactor::Gender, 9), &personas, PersonaType::All).unwrap();
        assert!(same.mean > other.mean);
    }

    #[test]
    fn empty_subset() {
        let personas = sample_population(&PopulationSpec { size: 10, ..Default::default() }, 0).unwrap();
        let a = random_table(&personas, HumanFactor::Race, 1);
        let none = PersonaSet::default();
        assert!(matches!(reliability(&a, &personas, &a, &none, PersonaType::All), Err(AnalysisError::EmptySubset(_))));
    }

    #[test]
    fn grid_shape() {
        let personas = sample_population(&PopulationSpec { size: 40, ..Default::default() }, 0).unwrap();
        let explicit: Vec<AnnotationTable> = HumanFactor::ALL.iter().enumerate().map(|(i, &f)| random_table(&personas, f, i as u64)).collect();
        let implicit: Vec<AnnotationTable> = HumanFactor::IMPLICIT.iter().enumerate().map(|(i, &f)| random_table(&personas, f, 10 + i as u64)).collect();
        let sources = [
            RaterSource { name: "Explicit", tables: &explicit, personas: &personas },
            RaterSource { name: "Implicit", tables: &implicit, personas: &personas },
        ];
        let grid = reliability_grid(&sources, Construct::Offensive).unwrap();
        assert_eq!(grid.rows.len(), 9);
        assert_eq!(grid.columns, ["Explicit vs. Implicit"]);
        assert!(grid.cells.iter().all(|c| c.value.is_some()));
    }
}
