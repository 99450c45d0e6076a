use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{tokenize, Feature, FeatureError, FeatureMatrix, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct NgramConfig {
    pub orders: Vec<usize>,
    /// Features found in fewer documents are dropped.
    pub min_doc_count: usize,
}

impl Default for NgramConfig {
    fn default() -> Self {
        NgramConfig { orders: vec![1, 2, 3], min_doc_count: 5 }
    }
}

/// (gram, order, count, relative frequency) for one document.
fn document_grams(tokens: &[String], orders: &[usize]) -> Vec<(String, usize, u32, f64)> {
    let mut out = Vec::new();
    for &n in orders {
        if tokens.len() < n {
            continue;
        }
        let total = tokens.len() - n + 1;
        let mut counts: HashMap<String, u32> = HashMap::new();
        for window in tokens.windows(n) {
            *counts.entry(window.join(" ")).or_default() += 1;
        }
        out.extend(
            counts
                .into_iter()
                .map(|(g, c)| (g, n, c, c as f64 / total as f64)),
        );
    }
    out
}

/// Counts 1..=3-grams per document and encodes each as its share of the
/// document's n-grams of the same order.
pub fn extract_ngrams(docs: &[(u64, &str)], cfg: &NgramConfig) -> Result<FeatureMatrix> {
    if docs.is_empty() {
        return Err(FeatureError::EmptyCorpus);
    }
    if cfg.orders.contains(&0) {
        return Err(FeatureError::InvalidOrder);
    }
    let mut orders = cfg.orders.clone();
    orders.sort_unstable();
    orders.dedup();

    let per_doc: Vec<(Vec<(String, usize, u32, f64)>, bool)> = docs
        .par_iter()
        .map(|(_, text)| {
            let tokens = tokenize(text);
            (document_grams(&tokens, &orders), !tokens.is_empty())
        })
        .collect();
    if per_doc.iter().all(|(_, nonempty)| !nonempty) {
        return Err(FeatureError::AllDocumentsEmpty);
    }

    let mut merged: BTreeMap<String, (usize, u64, Vec<(u32, f64)>)> = BTreeMap::new();
    for (doc, (grams, _)) in per_doc.into_iter().enumerate() {
        for (gram, order, count, rel) in grams {
            let entry = merged.entry(gram).or_insert_with(|| (order, 0, Vec::new()));
            entry.1 += count as u64;
            entry.2.push((doc as u32, rel));
        }
    }
    let cols = merged
        .into_iter()
        .filter(|(_, (_, _, col))| col.len() >= cfg.min_doc_count)
        .map(|(id, (order, corpus_count, col))| {
            (Feature { id, order, doc_count: col.len(), corpus_count }, col)
        })
        .collect();
    Ok(FeatureMatrix::new(docs.iter().map(|d| d.0).collect(), cols))
}
