//! The studies: how persona factors shape annotations, what language each
//! factor elicits, and how those language profiles agree across factors,
//! persona modes and prompt designs.
//!
//! Every study reads corpora or annotation tables produced by
//! [`crate::probe`] and returns [`Grid`]s ready for reporting.

mod annotation;
mod cross;
mod effects;
mod grid;
mod reliability;
mod result;

pub use annotation::{annotation_effects, column_label, ANNOTATION_GRID};
pub use cross::{bgt2, bgt2_from_corpora, bgt2_grid_name, bgt3, bgt3_grid, importance, importance_grid, CrossPair, BGT3_GRID, IMPORTANCE_GRID};
pub use effects::{bgt1, bgt1_validation, corpus_effects, corpus_label, factor_effects, factor_values, validation_grid, Bgt1, FeatureSource, VALIDATION_COLUMN, VALIDATION_GRID};
pub use grid::{meta_cell, Cell, Grid, AVERAGE_ROW};
pub use reliability::{reliability, reliability_grid, reliability_grid_name, PersonaType, RaterSource, RELIABILITY_GRID};
pub use result::{file_stem, read_grid_cells, write_grid_csv, Manifest, Study, StudyResult, MANIFEST_FILE, RESULT_FILE};

use thiserror::Error;

use crate::features::FeatureError;
use crate::persona::HumanFactor;
use crate::probe::ProbeError;
use crate::stats::StatsError;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("persona {0} is not in the persona set")]
    MissingPersona(u64),
    #[error("persona {persona} has no value for {factor}")]
    MissingFactor { persona: u64, factor: HumanFactor },
    #[error("corpus {0} has no documents")]
    EmptyCorpus(String),
    #[error("no feature of {0} passes the frequency threshold")]
    EmptyVocabulary(String),
    #[error("{0}")]
    Precondition(String),
    #[error("no signal: {0}")]
    NoSignal(String),
    #[error("missing {0}")]
    MissingTable(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("no raters of type {0}")]
    EmptySubset(String),
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = AnalysisError> = std::result::Result<T, E>;
