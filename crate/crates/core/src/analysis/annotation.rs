use super::effects::factor_values;
use super::grid::{Cell, Grid};
use super::{AnalysisError, Result};
use crate::persona::{HumanFactor, PersonaMode, PersonaSet};
use crate::probe::AnnotationTable;
use crate::stats::{effect_with_significance, EffectOutcome};
use crate::task::Construct;

pub const ANNOTATION_GRID: &str = "annotation";

pub fn column_label(mode: PersonaMode, construct: Construct) -> String {
    let mode = match mode {
        PersonaMode::Explicit => "Explicit",
        PersonaMode::Implicit => "Implicit",
    };
    format!("{mode} {}", construct.title())
}

fn effect_cell(table: &AnnotationTable, personas: &PersonaSet, factor: HumanFactor, row: &str, column: &str) -> Result<Cell> {
    let (ids, means): (Vec<u64>, Vec<f64>) = table.persona_means().into_iter().filter_map(|(id, m)| m.map(|m| (id, m))).unzip();
    let values = factor_values(personas, &ids, factor)?;
    Ok(match effect_with_significance(&means, &values, factor.kind())? {
        EffectOutcome::Computed(e) => {
            let mut cell = Cell::tested(row, column, e.effect, e.raw_p, e.n);
            if e.converged == Some(false) {
                cell.note = Some("logistic fit did not converge".into());
            }
            cell
        }
        EffectOutcome::Skipped(reason) => {
            let note = serde_json::to_value(reason).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
            Cell::empty(row, column, Some(&format!("skipped: {note}")))
        }
    })
}

/// Factor x (mode, construct) grid of effects on the share of posts a
/// persona labelled 1: Pearson r for age, Cohen's d otherwise. BH runs once
/// across the whole grid.
///
/// A column appears when any table for its mode and construct is given;
/// within it, every factor the mode supports must have a table.
pub fn annotation_effects(tables: &[AnnotationTable], personas: &PersonaSet, alpha: f64) -> Result<Grid> {
    let mut columns = Vec::new();
    let mut cells = Vec::new();
    for mode in [PersonaMode::Explicit, PersonaMode::Implicit] {
        for construct in Construct::ALL {
            if !tables.iter().any(|t| t.meta.mode == mode && t.meta.construct == construct) {
                continue;
            }
            let column = column_label(mode, construct);
            for factor in HumanFactor::ALL {
                let row = factor.title();
                if mode == PersonaMode::Implicit && !factor.supports_implicit() {
                    cells.push(Cell::empty(row, &column, Some("not applicable")));
                    continue;
                }
                let table = tables
                    .iter()
                    .find(|t| t.meta.mode == mode && t.meta.construct == construct && t.meta.factors == [factor])
                    .ok_or_else(|| AnalysisError::MissingTable(format!("{mode} {construct} annotations for {factor}")))?;
                cells.push(effect_cell(table, personas, factor, row, &column)?);
            }
            columns.push(column);
        }
    }
    let rows = HumanFactor::ALL.iter().map(|f| f.title().to_string()).collect();
    let mut grid = Grid::new(ANNOTATION_GRID, rows, columns, cells);
    grid.apply_bh(alpha)?;
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persona::{sample_population, PopulationSpec};
    use crate::probe::{run_annotation, Prober, ResponseCache, RetryPolicy, SyntheticModel, Vignette};

    fn tables(model: SyntheticModel, personas: &PersonaSet) -> Vec<AnnotationTable> {
        let prober = Prober::new(Box::new(model), ResponseCache::in_memory(), RetryPolicy::default(), 4, 0).unwrap();
        let mut out = Vec::new();
        for construct in Construct::ALL {
            let v = Vignette::bundled_for(construct);
            for f in HumanFactor::ALL {
                out.push(run_annotation(&prober, personas, &v, PersonaMode::Explicit, &[f], "").unwrap());
            }
        }
        out
    }

    #[test]
    fn gender_link_is_detected() {
        let personas = sample_population(&PopulationSpec::default(), 5).unwrap();
        let model = SyntheticModel::default().with_rating_link(Construct::Offensive, HumanFactor::Gender, 2.0);
        let grid = annotation_effects(&tables(model, &personas), &personas, 0.05).unwrap();
        assert_eq!(grid.rows.len(), 5);
        assert_eq!(grid.columns, ["Explicit Offensive", "Explicit Stigmatizing"]);
        let cell = grid.cell("Gender", "Explicit Offensive").unwrap();
        assert!(cell.value.unwrap() > 0.0 && cell.significant == Some(true), "{cell:?}");
        let null = grid.cell("Gender", "Explicit Stigmatizing").unwrap();
        assert!(null.value.unwrap().abs() < 0.3);
    }

    #[test]
    fn constant_responder_has_no_significant_cells() {
        let personas = sample_population(&PopulationSpec { size: 60, ..Default::default() }, 5).unwrap();
        let model = SyntheticModel { rating_intercept: 50.0, ..Default::default() };
        let grid = annotation_effects(&tables(model, &personas), &personas, 0.05).unwrap();
        assert!(grid.cells.iter().all(|c| c.significant != Some(true)));
        assert!(grid.cells.iter().all(|c| c.value.is_none()));
    }

    #[test]
    fn missing_table_is_an_error() {
        let personas = sample_population(&PopulationSpec { size: 30, ..Default::default() }, 5).unwrap();
        let mut t = tables(SyntheticModel::default(), &personas);
        t.remove(0);
        assert!(matches!(annotation_effects(&t, &personas, 0.05), Err(AnalysisError::MissingTable(_))));
    }
}
