//! TF-IDF over word and URL n-grams.
//!
//! The vocabulary keeps the `max_features` n-grams with the highest raw
//! corpus frequency (ties broken lexicographically); columns are numbered in
//! lexicographic order of the kept n-grams. IDF uses the smoothed form
//! `ln((1 + N) / (1 + df)) + 1` and each post's vector is L2-normalized.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::FeatureError;
use crate::text::{self, Token};

pub const DEFAULT_MAX_FEATURES: usize = 5000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfModel {
    vocabulary: BTreeMap<String, usize>,
    idf: Vec<f64>,
    ngram_range: (usize, usize),
    max_features: usize,
}

/// N-gram strings of the word and URL tokens; punctuation is dropped.
pub fn ngram_terms(tokens: &[Token], ngram_range: (usize, usize)) -> Vec<String> {
    let words: Vec<&str> = tokens
        .iter()
        .filter(|t| !matches!(t.kind, text::TokenKind::Punct))
        .map(|t| t.text.as_str())
        .collect();
    let mut terms = Vec::new();
    for n in ngram_range.0.max(1)..=ngram_range.1 {
        for gram in words.windows(n) {
            terms.push(gram.join(" "));
        }
    }
    terms
}

impl TfidfModel {
    pub fn fit<S: AsRef<str>>(
        documents: &[S],
        max_features: usize,
        ngram_range: (usize, usize),
    ) -> Result<Self, FeatureError> {
        if documents.is_empty() {
            return Err(FeatureError::EmptyCorpus);
        }
        if max_features < 1 {
            return Err(FeatureError::InvalidMaxFeatures);
        }
        let mut tf: HashMap<String, u64> = HashMap::new();
        let mut df: HashMap<String, u64> = HashMap::new();
        for doc in documents {
            let terms = ngram_terms(&text::tokenize(doc.as_ref()), ngram_range);
            let mut seen: Vec<&String> = Vec::with_capacity(terms.len());
            for term in &terms {
                *tf.entry(term.clone()).or_default() += 1;
                seen.push(term);
            }
            seen.sort_unstable();
            seen.dedup();
            for term in seen {
                *df.entry(term.clone()).or_default() += 1;
            }
        }

        let mut ranked: Vec<(&String, u64)> = tf.iter().map(|(t, c)| (t, *c)).collect();
        ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked.truncate(max_features);
        let mut kept: Vec<&String> = ranked.into_iter().map(|(t, _)| t).collect();
        kept.sort_unstable();

        let n = documents.len() as f64;
        let idf = kept
            .iter()
            .map(|t| ((1.0 + n) / (1.0 + df[*t] as f64)).ln() + 1.0)
            .collect();
        let vocabulary = kept
            .into_iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(TfidfModel {
            vocabulary,
            idf,
            ngram_range,
            max_features,
        })
    }

    pub fn len(&self) -> usize {
        self.idf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idf.is_empty()
    }

    pub fn column(&self, term: &str) -> Option<usize> {
        self.vocabulary.get(term).copied()
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.column(term).map(|c| self.idf[c])
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = (&str, usize)> {
        self.vocabulary.iter().map(|(t, c)| (t.as_str(), *c))
    }

    pub fn ngram_range(&self) -> (usize, usize) {
        self.ngram_range
    }

    pub fn max_features(&self) -> usize {
        self.max_features
    }

    /// Sparse, L2-normalized `(column, value)` pairs sorted by column.
    pub fn transform_tokens(&self, tokens: &[Token]) -> Vec<(usize, f64)> {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for term in ngram_terms(tokens, self.ngram_range) {
            if let Some(&col) = self.vocabulary.get(&term) {
                *counts.entry(col).or_default() += 1.0;
            }
        }
        let mut values: Vec<(usize, f64)> = counts
            .into_iter()
            .map(|(col, tf)| (col, tf * self.idf[col]))
            .collect();
        let norm = values.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, v) in &mut values {
                *v /= norm;
            }
        }
        values
    }

    pub fn transform(&self, text: &str) -> Vec<(usize, f64)> {
        self.transform_tokens(&text::tokenize(text))
    }
}

/// Fit on post bodies with the default `(1, 2)` n-gram range.
pub fn fit_tfidf(
    posts: &[crate::LabeledPost],
    max_features: usize,
) -> Result<TfidfModel, FeatureError> {
    let bodies: Vec<&str> = posts.iter().map(|p| p.body.as_str()).collect();
    TfidfModel::fit(&bodies, max_features, (1, 2))
}

pub fn tfidf_vector(post: &crate::LabeledPost, model: &TfidfModel) -> Vec<(usize, f64)> {
    model.transform(&post.body)
}
