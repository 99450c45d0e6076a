use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::grid::{Cell, Grid};
use super::{AnalysisError, Result};
use crate::stats::EffectTable;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RESULT_FILE: &str = "result.json";

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema,
)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    Annotation,
    Bgt1,
    Bgt2,
    Bgt3,
    Importance,
    Reliability,
    Validation,
}

impl Study {
    pub const ALL: [Study; 7] = [
        Study::Annotation,
        Study::Bgt1,
        Study::Bgt2,
        Study::Bgt3,
        Study::Importance,
        Study::Reliability,
        Study::Validation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Study::Annotation => "annotation",
            Study::Bgt1 => "bgt1",
            Study::Bgt2 => "bgt2",
            Study::Bgt3 => "bgt3",
            Study::Importance => "importance",
            Study::Reliability => "reliability",
            Study::Validation => "validation",
        }
    }
}

impl fmt::Display for Study {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Study {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self> {
        Study::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| AnalysisError::Unsupported(format!("unknown study `{s}`")))
    }
}

/// Output of one study run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub study: Study,
    /// Fingerprint of the configuration the result was computed from.
    pub fingerprint: String,
    pub alpha: f64,
    pub seed: u64,
    pub grids: Vec<Grid>,
    /// Per-feature tables behind the grids (BGT1 keeps them for word clouds).
    pub effect_tables: Vec<EffectTable>,
    /// Corpus frequencies of significant features, keyed by table label.
    #[serde(default)]
    pub frequencies: BTreeMap<String, BTreeMap<String, u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub study: Study,
    pub fingerprint: String,
    pub run_id: String,
    pub alpha: f64,
    pub seed: u64,
    pub version: String,
    pub files: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct GridRow {
    row: String,
    column: String,
    value: Option<f64>,
    p: Option<f64>,
    adjusted_p: Option<f64>,
    significant: Option<bool>,
    n: Option<usize>,
    note: Option<String>,
}

const GRID_HEADER: [&str; 8] = ["row", "column", "value", "p", "adjusted_p", "significant", "n", "note"];

/// Turns a table label into a file stem.
pub fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Raw grid CSV: `row,column,value,p,adjusted_p,significant,n,note`.
pub fn write_grid_csv<W: std::io::Write>(grid: &Grid, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if grid.cells.is_empty() {
        w.write_record(GRID_HEADER)?;
    }
    for c in &grid.cells {
        w.serialize(GridRow {
            row: c.row.clone(),
            column: c.column.clone(),
            value: c.value,
            p: c.p,
            adjusted_p: c.adjusted_p,
            significant: c.significant,
            n: c.n,
            note: c.note.clone(),
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Cells of a CSV written by [`write_grid_csv`], in file order.
pub fn read_grid_cells<R: std::io::Read>(input: R) -> Result<Vec<Cell>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut cells = Vec::new();
    for row in rdr.deserialize::<GridRow>() {
        let r = row?;
        cells.push(Cell {
            row: r.row,
            column: r.column,
            value: r.value,
            p: r.p,
            adjusted_p: r.adjusted_p,
            significant: r.significant,
            n: r.n,
            note: r.note,
        });
    }
    Ok(cells)
}

impl StudyResult {
    pub fn new(study: Study, fingerprint: &str, alpha: f64, seed: u64) -> Self {
        StudyResult { study, fingerprint: fingerprint.to_string(), alpha, seed, grids: Vec::new(), effect_tables: Vec::new(), frequencies: BTreeMap::new() }
    }

    pub fn grid(&self, name: &str) -> Option<&Grid> {
        self.grids.iter().find(|g| g.name == name)
    }

    /// Derived from the fingerprint and seed, so reruns land in the same
    /// directory.
    pub fn run_id(&self) -> String {
        let short: String = self.fingerprint.chars().take(12).collect();
        format!("{short}-s{}", self.seed)
    }

    pub fn dir(&self, results_dir: &Path) -> PathBuf {
        results_dir.join(self.study.as_str()).join(self.run_id())
    }

    /// Writes `results/<study>/<run-id>/` with one CSV per grid, one per
    /// effect table under `effects/`, the full result as JSON, and the
    /// manifest. Returns the directory.
    pub fn write(&self, results_dir: &Path) -> Result<PathBuf> {
        let dir = self.dir(results_dir);
        fs::create_dir_all(&dir)?;
        let mut files = Vec::new();
        for grid in &self.grids {
            let name = format!("{}.csv", file_stem(&grid.name));
            write_grid_csv(grid, BufWriter::new(File::create(dir.join(&name))?))?;
            files.push(name);
        }
        if !self.effect_tables.is_empty() {
            fs::create_dir_all(dir.join("effects"))?;
        }
        for table in &self.effect_tables {
            let name = format!("effects/{}.csv", file_stem(&table.meta.label));
            table.write_csv(BufWriter::new(File::create(dir.join(&name))?))?;
            files.push(name);
        }
        write_json(&dir.join(RESULT_FILE), self)?;
        files.push(RESULT_FILE.to_string());
        let manifest = Manifest {
            study: self.study,
            fingerprint: self.fingerprint.clone(),
            run_id: self.run_id(),
            alpha: self.alpha,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            files,
        };
        write_json(&dir.join(MANIFEST_FILE), &manifest)?;
        Ok(dir)
    }

    /// Loads a result directory written by [`StudyResult::write`].
    pub fn read(dir: &Path) -> Result<Self> {
        let text = fs::read_to_string(dir.join(RESULT_FILE))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
