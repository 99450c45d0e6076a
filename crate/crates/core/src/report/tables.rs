use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{ReportError, Result};
use crate::analysis::{file_stem, Cell, Grid, Study, StudyResult};
use crate::stats::EffectTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    Csv,
    Json,
    Markdown,
}

impl TableFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Json => "json",
            TableFormat::Markdown => "md",
        }
    }
}

impl FromStr for TableFormat {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for TableFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableFormat::Csv => "csv",
            TableFormat::Json => "json",
            TableFormat::Markdown => "markdown",
        })
    }
}

/// Two decimals without a leading zero, the way the published tables print
/// correlations and effect sizes (`.37`, `-.19`, `-4.58`).
pub fn format_value(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = if s == "-0.00" { "0.00".to_string() } else { s };
    if let Some(rest) = s.strip_prefix("0.") {
        format!(".{rest}")
    } else if let Some(rest) = s.strip_prefix("-0.") {
        format!("-.{rest}")
    } else {
        s
    }
}

/// `-` for empty cells, `ns` for tested cells that did not survive BH.
pub fn cell_text(cell: &Cell) -> String {
    match (cell.value, cell.significant) {
        (None, _) => "-".into(),
        (Some(_), Some(false)) => "ns".into(),
        (Some(v), _) => format_value(v),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplayRow {
    pub label: String,
    pub cells: Vec<String>,
}

/// A grid rendered to text, shaped like the published tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplayTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<DisplayRow>,
}

const ROW_HEADER: &str = "row";

impl DisplayTable {
    pub fn from_grid(grid: &Grid) -> Self {
        let rows = grid
            .rows
            .iter()
            .enumerate()
            .map(|(i, label)| DisplayRow {
                label: label.clone(),
                cells: grid.cells[i * grid.columns.len()..(i + 1) * grid.columns.len()].iter().map(cell_text).collect(),
            })
            .collect();
        DisplayTable { name: grid.name.clone(), columns: grid.columns.clone(), rows }
    }

    /// Significant features with their effect and adjusted p.
    pub fn from_significant(table: &EffectTable) -> Self {
        let rows = table
            .significant()
            .into_iter()
            .map(|r| DisplayRow { label: r.feature.clone(), cells: vec![format!("{:.3}", r.effect), format!("{:.2e}", r.adjusted_p)] })
            .collect();
        DisplayTable {
            name: format!("top_{}", file_stem(&table.meta.label)),
            columns: vec!["effect".into(), "adjusted_p".into()],
            rows,
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(std::iter::once(ROW_HEADER).chain(self.columns.iter().map(String::as_str)))?;
        for r in &self.rows {
            w.write_record(std::iter::once(r.label.as_str()).chain(r.cells.iter().map(String::as_str)))?;
        }
        let bytes = w.into_inner().map_err(|e| ReportError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv(name: &str, text: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let header = rdr.headers()?.clone();
        let columns = header.iter().skip(1).map(str::to_string).collect();
        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let mut fields = record.iter().map(str::to_string);
            let label = fields.next().unwrap_or_default();
            rows.push(DisplayRow { label, cells: fields.collect() });
        }
        Ok(DisplayTable { name: name.to_string(), columns, rows })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_markdown(&self) -> String {
        let escape = |s: &str| s.replace('|', "\\|");
        let mut out = String::new();
        out.push_str("| ");
        out.push_str(&std::iter::once(ROW_HEADER.to_string()).chain(self.columns.iter().map(|c| escape(c))).collect::<Vec<_>>().join(" | "));
        out.push_str(" |\n|");
        out.push_str(&"---|".repeat(self.columns.len() + 1));
        out.push('\n');
        for r in &self.rows {
            out.push_str("| ");
            out.push_str(&std::iter::once(escape(&r.label)).chain(r.cells.iter().map(|c| escape(c))).collect::<Vec<_>>().join(" | "));
            out.push_str(" |\n");
        }
        out
    }

    pub fn render(&self, format: TableFormat) -> Result<String> {
        match format {
            TableFormat::Csv => self.to_csv(),
            TableFormat::Json => self.to_json(),
            TableFormat::Markdown => Ok(self.to_markdown()),
        }
    }
}

/// Every table a result renders to: one per grid, plus the significant
/// features of each BGT1 effect table. A result with nothing to show
/// yields one empty table named after the study.
pub fn display_tables(result: &StudyResult) -> Vec<DisplayTable> {
    let mut tables: Vec<DisplayTable> = result.grids.iter().map(DisplayTable::from_grid).collect();
    if result.study == Study::Bgt1 {
        tables.extend(result.effect_tables.iter().map(DisplayTable::from_significant));
    }
    if tables.is_empty() {
        tables.push(DisplayTable { name: result.study.to_string(), columns: Vec::new(), rows: Vec::new() });
    }
    tables
}

/// Writes each display table of `result` to `out_dir/<name>.<ext>`.
pub fn emit_tables(result: &StudyResult, format: TableFormat, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    display_tables(result)
        .into_iter()
        .map(|t| {
            let path = out_dir.join(format!("{}.{}", file_stem(&t.name), format.extension()));
            fs::write(&path, t.render(format)?)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annotation_grid() -> Grid {
        let rows: Vec<String> = ["Age", "Gender", "Political Ideology", "Race", "Substance Use"].map(String::from).to_vec();
        let columns = vec!["Explicit Offensive".to_string(), "Explicit Stigmatizing".to_string()];
        let mut cells = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            cells.push(Cell::tested(r, &columns[0], -0.5 * i as f64, 0.001, 641));
            cells.push(Cell::tested(r, &columns[1], 0.01, 0.9, 641));
        }
        let mut g = Grid::new("annotation", rows, columns, cells);
        g.apply_bh(0.05).unwrap();
        g
    }

    #[test]
    fn published_number_style() {
        assert_eq!(format_value(0.368), ".37");
        assert_eq!(format_value(-0.19), "-.19");
        assert_eq!(format_value(-4.58), "-4.58");
        assert_eq!(format_value(-0.001), ".00");
    }

    #[test]
    fn annotation_table_shape_with_ns() {
        let t = DisplayTable::from_grid(&annotation_grid());
        assert_eq!(t.rows.len(), 5);
        assert_eq!(t.columns.len(), 2);
        assert_eq!(t.rows[2].cells, ["-1.00", "ns"]);
        assert!(t.to_markdown().contains("| Political Ideology | -1.00 | ns |"));
    }

    #[test]
    fn csv_and_json_round_trip() {
        let t = DisplayTable::from_grid(&annotation_grid());
        let from_csv = DisplayTable::from_csv("annotation", &t.to_csv().unwrap()).unwrap();
        let from_json: DisplayTable = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(from_csv, t);
        assert_eq!(from_json, t);
    }

    #[test]
    fn empty_study_is_header_only() {
        let tmp = tempfile::tempdir().unwrap();
        let r = StudyResult::new(Study::Bgt2, "f", 0.05, 0);
        let files = emit_tables(&r, TableFormat::Csv, tmp.path()).unwrap();
        assert_eq!(files.len(), 1);
        assert_eq!(fs::read_to_string(&files[0]).unwrap(), "row\n");
    }

    #[test]
    fn unknown_format() {
        assert!(matches!("xlsx".parse::<TableFormat>(), Err(ReportError::UnknownFormat(_))));
        assert_eq!("markdown".parse::<TableFormat>().unwrap(), TableFormat::Markdown);
    }
}
