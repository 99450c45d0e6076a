use serde::{Deserialize, Serialize};

use super::Result;
use crate::stats::{bh_fdr, MetaCorrelation, StatsError};

pub const AVERAGE_ROW: &str = "Average";

/// One reported statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub row: String,
    pub column: String,
    /// `None` when not applicable or not computable (see `note`).
    pub value: Option<f64>,
    pub p: Option<f64>,
    pub adjusted_p: Option<f64>,
    /// `None` for cells that carry no test (averages, kappas).
    pub significant: Option<bool>,
    pub n: Option<usize>,
    pub note: Option<String>,
}

impl Cell {
    pub fn empty(row: &str, column: &str, note: Option<&str>) -> Self {
        Cell {
            row: row.to_string(),
            column: column.to_string(),
            value: None,
            p: None,
            adjusted_p: None,
            significant: None,
            n: None,
            note: note.map(str::to_string),
        }
    }

    pub fn value(row: &str, column: &str, value: f64, n: Option<usize>) -> Self {
        Cell { value: Some(value), n, ..Cell::empty(row, column, None) }
    }

    pub fn tested(row: &str, column: &str, value: f64, p: f64, n: usize) -> Self {
        Cell { value: Some(value), p: Some(p), n: Some(n), ..Cell::empty(row, column, None) }
    }
}

/// Rows x columns table of cells, stored row-major and complete.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub name: String,
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub cells: Vec<Cell>,
}

impl Grid {
    /// Orders `cells` row-major, filling absent positions with empty cells.
    pub fn new(name: &str, rows: Vec<String>, columns: Vec<String>, mut cells: Vec<Cell>) -> Self {
        let mut ordered = Vec::with_capacity(rows.len() * columns.len());
        for r in &rows {
            for c in &columns {
                match cells.iter().position(|cell| &cell.row == r && &cell.column == c) {
                    Some(i) => ordered.push(cells.swap_remove(i)),
                    None => ordered.push(Cell::empty(r, c, None)),
                }
            }
        }
        Grid { name: name.to_string(), rows, columns, cells: ordered }
    }

    pub fn cell(&self, row: &str, column: &str) -> Option<&Cell> {
        let r = self.rows.iter().position(|x| x == row)?;
        let c = self.columns.iter().position(|x| x == column)?;
        self.cells.get(r * self.columns.len() + c)
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// BH over every cell that has a p-value, setting `adjusted_p` and
    /// `significant`. Intended to be called once per reported grid.
    pub fn apply_bh(&mut self, alpha: f64) -> Result<()> {
        let idx: Vec<usize> = (0..self.cells.len()).filter(|&i| self.cells[i].p.is_some()).collect();
        if idx.is_empty() {
            return Ok(());
        }
        let raw: Vec<f64> = idx.iter().map(|&i| self.cells[i].p.expect("filtered")).collect();
        let bh = bh_fdr(&raw, alpha)?;
        for (k, &i) in idx.iter().enumerate() {
            self.cells[i].adjusted_p = Some(bh.adjusted[k]);
            self.cells[i].significant = Some(bh.reject[k]);
        }
        Ok(())
    }

    /// Appends a row holding each column's mean over the values present.
    pub fn push_average_row(&mut self) {
        let means: Vec<Cell> = self
            .columns
            .iter()
            .map(|c| {
                let vals: Vec<f64> = self.cells.iter().filter(|x| &x.column == c && x.row != AVERAGE_ROW).filter_map(|x| x.value).collect();
                if vals.is_empty() {
                    Cell::empty(AVERAGE_ROW, c, Some("no values"))
                } else {
                    Cell::value(AVERAGE_ROW, c, vals.iter().sum::<f64>() / vals.len() as f64, Some(vals.len()))
                }
            })
            .collect();
        self.rows.push(AVERAGE_ROW.to_string());
        self.cells.extend(means);
    }
}

/// Cell for a meta-correlation; failures become an empty cell with a note.
pub fn meta_cell(row: &str, column: &str, outcome: std::result::Result<MetaCorrelation, StatsError>) -> Cell {
    match outcome {
        Ok(m) => Cell::tested(row, column, m.r, m.p, m.aligned),
        Err(e) => Cell::empty(row, column, Some(&e.to_string())),
    }
}
