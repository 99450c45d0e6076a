//! Document x feature relative-frequency matrices.

mod lexicon;
mod matrix;
mod ngrams;
mod tokenize;

pub use lexicon::{score_lexicon, Lexicon, LexiconTerm};
pub use matrix::{Feature, FeatureMatrix};
pub use ngrams::{extract_ngrams, NgramConfig};
pub use tokenize::tokenize;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("corpus has no documents")]
    EmptyCorpus,
    #[error("every document is empty")]
    AllDocumentsEmpty,
    #[error("n-gram order must be at least 1")]
    InvalidOrder,
    #[error("lexicon `{name}` line {line}: {message}")]
    LexiconFormat { name: String, line: usize, message: String },
    #[error("lexicon `{0}` has no categories")]
    EmptyLexicon(String),
    #[error("lexicon category `{0}` has no terms")]
    EmptyCategory(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = FeatureError> = std::result::Result<T, E>;
