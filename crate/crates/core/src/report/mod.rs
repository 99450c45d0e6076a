//! Rendering study results: tables in the published layout, word clouds
//! and the comparison against published values.

mod cloud;
mod replication;
mod svg;
mod tables;

pub use cloud::{wordcloud_data, CloudData, CloudEntry, FrequencyBucket, Sign};
pub use replication::{published_tables, PublishedTable, ReplicationReport, ReplicationRow};
pub use svg::{render_svg, text_box, LayoutParams, Placed, Rendered, CHAR_WIDTH_EM};
pub use tables::{cell_text, display_tables, emit_tables, format_value, DisplayRow, DisplayTable, TableFormat};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("unknown table format `{0}` (expected csv, json or markdown)")]
    UnknownFormat(String),
    #[error("word cloud has no entries")]
    EmptyCloud,
    #[error("layout: {0}")]
    Layout(String),
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = ReportError> = std::result::Result<T, E>;
