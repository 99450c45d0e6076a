use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;

use super::{tokenize, Feature, FeatureError, FeatureMatrix, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconTerm {
    pub text: String,
    /// Term ended with `*` and matches any token it prefixes.
    pub prefix: bool,
}

impl LexiconTerm {
    pub fn parse(raw: &str) -> Self {
        let raw = raw.trim().to_lowercase();
        match raw.strip_suffix('*') {
            Some(stem) => LexiconTerm { text: stem.to_string(), prefix: true },
            None => LexiconTerm { text: raw, prefix: false },
        }
    }

    pub fn matches(&self, token: &str) -> bool {
        if self.prefix {
            token.starts_with(&self.text)
        } else {
            token == self.text
        }
    }
}

/// Category dictionary in the LIWC style.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub name: String,
    categories: BTreeMap<String, Vec<LexiconTerm>>,
}

impl Lexicon {
    pub fn new(name: impl Into<String>, categories: BTreeMap<String, Vec<LexiconTerm>>) -> Result<Self> {
        let name = name.into();
        if categories.is_empty() {
            return Err(FeatureError::EmptyLexicon(name));
        }
        if let Some((cat, _)) = categories.iter().find(|(_, terms)| terms.is_empty()) {
            return Err(FeatureError::EmptyCategory(cat.clone()));
        }
        Ok(Lexicon { name, categories })
    }

    /// Parses `category<TAB>term` lines; `#` starts a comment line.
    pub fn from_tsv<R: BufRead>(name: &str, input: R) -> Result<Self> {
        let mut categories: BTreeMap<String, Vec<LexiconTerm>> = BTreeMap::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let bad = |message: &str| FeatureError::LexiconFormat {
                name: name.to_string(),
                line: i + 1,
                message: message.to_string(),
            };
            let (cat, term) = line.split_once('\t').ok_or_else(|| bad("expected category<TAB>term"))?;
            let term = LexiconTerm::parse(term);
            if cat.trim().is_empty() || term.text.is_empty() {
                return Err(bad("empty category or term"));
            }
            let terms = categories.entry(cat.trim().to_string()).or_default();
            if !terms.contains(&term) {
                terms.push(term);
            }
        }
        Lexicon::new(name, categories)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let name = path.file_stem().map_or("lexicon".into(), |s| s.to_string_lossy().into_owned());
        Lexicon::from_tsv(&name, std::io::BufReader::new(std::fs::File::open(path)?))
    }

    pub fn categories(&self) -> impl Iterator<Item = (&str, &[LexiconTerm])> {
        self.categories.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

/// Share of each document's tokens matching each category.
///
/// Documents without tokens are left out of the matrix (scored missing).
pub fn score_lexicon(docs: &[(u64, &str)], lexicon: &Lexicon) -> Result<FeatureMatrix> {
    if docs.is_empty() {
        return Err(FeatureError::EmptyCorpus);
    }
    let mut doc_ids = Vec::new();
    let mut cols: Vec<(Feature, Vec<(u32, f64)>)> = lexicon
        .categories
        .keys()
        .map(|c| (Feature { id: c.clone(), order: 0, doc_count: 0, corpus_count: 0 }, Vec::new()))
        .collect();
    for &(id, text) in docs {
        let tokens = tokenize(text);
        if tokens.is_empty() {
            continue;
        }
        let row = doc_ids.len() as u32;
        doc_ids.push(id);
        for ((feature, col), terms) in cols.iter_mut().zip(lexicon.categories.values()) {
            let hits = tokens.iter().filter(|t| terms.iter().any(|term| term.matches(t))).count();
            if hits > 0 {
                feature.doc_count += 1;
                feature.corpus_count += hits as u64;
                col.push((row, hits as f64 / tokens.len() as f64));
            }
        }
    }
    if doc_ids.is_empty() {
        return Err(FeatureError::AllDocumentsEmpty);
    }
    Ok(FeatureMatrix::new(doc_ids, cols))
}
