use serde::{Deserialize, Serialize};

use super::tables::{cell_text, format_value, DisplayRow, DisplayTable};
use super::{ReportError, Result};
use crate::analysis::{Grid, StudyResult};

/// A published table as printed: numbers, `ns` or `-`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublishedTable {
    pub grid: String,
    pub columns: Vec<String>,
    /// Row label followed by one entry per column.
    pub rows: Vec<Vec<String>>,
}

/// The bundled published grids: annotation, the BGT2 panels, BGT3,
/// importance and reliability.
pub fn published_tables() -> Result<Vec<PublishedTable>> {
    let tables: Vec<PublishedTable> = serde_json::from_str(include_str!("../../data/published_values.json"))?;
    for t in &tables {
        if let Some(bad) = t.rows.iter().find(|r| r.len() != t.columns.len() + 1) {
            return Err(ReportError::Data(format!("{} row {:?} has the wrong width", t.grid, bad.first())));
        }
    }
    Ok(tables)
}

fn parse_published(s: &str) -> Option<f64> {
    s.parse().ok()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRow {
    pub grid: String,
    pub row: String,
    pub column: String,
    pub published: String,
    /// As printed locally (`ns`, `-`, a value), or `missing` when the
    /// study has not been run.
    pub live: String,
    pub live_value: Option<f64>,
    /// live minus published, when both are numbers.
    pub difference: Option<f64>,
}

/// Cell-by-cell comparison of local results against the published tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationReport {
    pub rows: Vec<ReplicationRow>,
}

impl ReplicationReport {
    pub fn build(results: &[StudyResult]) -> Result<Self> {
        let grids: Vec<&Grid> = results.iter().flat_map(|r| &r.grids).collect();
        let mut rows = Vec::new();
        for table in published_tables()? {
            let live_grid = grids.iter().find(|g| g.name == table.grid);
            for printed in &table.rows {
                let label = &printed[0];
                for (column, published) in table.columns.iter().zip(&printed[1..]) {
                    let cell = live_grid.and_then(|g| g.cell(label, column));
                    let live = cell.map_or_else(|| "missing".to_string(), cell_text);
                    let live_value = cell.and_then(|c| c.value);
                    let difference = match (live_value, parse_published(published)) {
                        (Some(l), Some(p)) => Some(l - p),
                        _ => None,
                    };
                    rows.push(ReplicationRow {
                        grid: table.grid.clone(),
                        row: label.clone(),
                        column: column.clone(),
                        published: published.clone(),
                        live,
                        live_value,
                        difference,
                    });
                }
            }
        }
        Ok(ReplicationReport { rows })
    }

    pub fn compared(&self) -> usize {
        self.rows.iter().filter(|r| r.difference.is_some()).count()
    }

    pub fn to_table(&self) -> DisplayTable {
        DisplayTable {
            name: "replication".into(),
            columns: ["grid", "column", "published", "live", "difference"].map(String::from).to_vec(),
            rows: self
                .rows
                .iter()
                .map(|r| DisplayRow {
                    label: r.row.clone(),
                    cells: vec![
                        r.grid.clone(),
                        r.column.clone(),
                        r.published.clone(),
                        r.live.clone(),
                        r.difference.map_or_else(|| "-".to_string(), |d| if d > 0.0 { format!("+{}", format_value(d)) } else { format_value(d) }),
                    ],
                })
                .collect(),
        }
    }
}
