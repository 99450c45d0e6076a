use std::io::Write;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feature {
    /// N-gram text (tokens joined by a space) or lexicon category.
    pub id: String,
    /// N-gram order; 0 for lexicon categories.
    pub order: usize,
    pub doc_count: usize,
    pub corpus_count: u64,
}

/// Sparse document x feature matrix of relative frequencies, stored by
/// column. Features are sorted by id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureMatrix {
    doc_ids: Vec<u64>,
    features: Vec<Feature>,
    columns: Vec<Vec<(u32, f64)>>,
}

impl FeatureMatrix {
    pub(crate) fn new(doc_ids: Vec<u64>, mut cols: Vec<(Feature, Vec<(u32, f64)>)>) -> Self {
        cols.sort_by(|a, b| a.0.id.cmp(&b.0.id));
        let (features, columns) = cols.into_iter().unzip();
        FeatureMatrix { doc_ids, features, columns }
    }

    pub fn doc_ids(&self) -> &[u64] {
        &self.doc_ids
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn feature_index(&self, id: &str) -> Option<usize> {
        self.features.binary_search_by(|f| f.id.as_str().cmp(id)).ok()
    }

    /// Non-zero entries of a column as (document index, value).
    pub fn column(&self, feature: usize) -> &[(u32, f64)] {
        &self.columns[feature]
    }

    pub fn dense_column(&self, feature: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.doc_ids.len()];
        for &(d, v) in &self.columns[feature] {
            out[d as usize] = v;
        }
        out
    }

    pub fn value(&self, doc: usize, feature: usize) -> f64 {
        let col = &self.columns[feature];
        col.binary_search_by_key(&(doc as u32), |e| e.0).map_or(0.0, |i| col[i].1)
    }

    /// Sparse CSV `doc_id,feature,relative_frequency`, non-zero entries
    /// only, ordered by document then feature.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut rows: Vec<(u32, usize, f64)> = self
            .columns
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |&(d, v)| (d, j, v)))
            .collect();
        rows.sort_by_key(|&(d, j, _)| (d, j));
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["doc_id", "feature", "relative_frequency"])?;
        for (d, j, v) in rows {
            w.write_record([
                self.doc_ids[d as usize].to_string(),
                self.features[j].id.clone(),
                v.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
