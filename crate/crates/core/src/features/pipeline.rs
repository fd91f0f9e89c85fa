use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::FeatureConfig;
use super::embedding::{embed_tokens, EmbeddingTable};
use super::heuristics::HeuristicBundle;
use super::patterns::{normalize_text, PatternCounters, PatternSet};
use super::scaler::ScalerModel;
use super::sentiment::{LexiconRatioScorer, SentimentScorer};
use super::surface::{surface_stats_tokens, PRONOUNS};
use super::tfidf::TfidfModel;
use crate::error::{FeatureError, Result};
use crate::lexicons::{hex, LexiconSet, NegationList};
use crate::text;
use crate::LabeledPost;

/// Name of the lexicon the default sentiment scorer reads.
pub const SENTIMENT_LEXICON: &str = "mpqa";

/// Column name of the catch-all user-rank column.
pub const OTHER_RANK: &str = "rank:OTHER";

/// External resources a pipeline reads but does not own.
#[derive(Debug, Clone)]
pub struct FeatureResources {
    pub lexicons: Arc<LexiconSet>,
    pub embeddings: Option<Arc<EmbeddingTable>>,
    pub negation: NegationList,
    /// `None` selects the lexicon-ratio scorer over [`SENTIMENT_LEXICON`].
    pub scorer: Option<Arc<dyn SentimentScorer>>,
    pub heuristics: HeuristicBundle,
}

impl FeatureResources {
    pub fn new(lexicons: LexiconSet, embeddings: Option<EmbeddingTable>) -> Self {
        FeatureResources {
            lexicons: Arc::new(lexicons),
            embeddings: embeddings.map(Arc::new),
            negation: NegationList::default(),
            scorer: None,
            heuristics: HeuristicBundle::default(),
        }
    }

    /// Bundled lexicons and the bundled tiny embedding table.
    pub fn builtin() -> Self {
        Self::new(LexiconSet::builtin(), Some(EmbeddingTable::tiny()))
    }

    fn scorer(&self) -> Result<Arc<dyn SentimentScorer>, FeatureError> {
        if let Some(s) = &self.scorer {
            return Ok(s.clone());
        }
        let lexicon = self
            .lexicons
            .get(SENTIMENT_LEXICON)
            .ok_or_else(|| FeatureError::MissingLexicon(SENTIMENT_LEXICON.into()))?;
        Ok(Arc::new(LexiconRatioScorer::new(
            lexicon.clone(),
            self.negation.clone(),
        )))
    }
}

/// Fitted, serializable part of a pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedParts {
    pub config: FeatureConfig,
    pub tfidf: Option<TfidfModel>,
    pub scaler: ScalerModel,
    /// Author ranks seen in training, sorted.
    pub rank_vocab: Vec<String>,
    /// Names of the dense columns, scaled block first, then rank columns.
    pub dense_names: Vec<String>,
}

/// Sparse TF-IDF block followed by a dense block.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    /// `(column, value)` pairs, sorted, all below `dense_offset`.
    pub sparse: Vec<(usize, f64)>,
    /// Values of columns `dense_offset..dense_offset + dense.len()`.
    pub dense: Vec<f64>,
    pub dense_offset: usize,
    pub fingerprint: Arc<str>,
}

impl FeatureVector {
    /// A purely dense vector, handy for tests and toy problems.
    pub fn from_dense(values: Vec<f64>, fingerprint: impl Into<Arc<str>>) -> Self {
        FeatureVector {
            sparse: Vec::new(),
            dense: values,
            dense_offset: 0,
            fingerprint: fingerprint.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dense_offset + self.dense.len()
    }

    /// Explicitly stored `(column, value)` pairs in column order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.sparse.iter().copied().chain(
            self.dense
                .iter()
                .enumerate()
                .map(move |(i, v)| (self.dense_offset + i, *v)),
        )
    }

    pub fn dot(&self, weights: &[f64]) -> f64 {
        let sparse: f64 = self.sparse.iter().map(|&(c, v)| weights[c] * v).sum();
        let dense: f64 = self
            .dense
            .iter()
            .zip(&weights[self.dense_offset..])
            .map(|(v, w)| v * w)
            .sum();
        sparse + dense
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries().map(|(_, v)| v * v).sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (c, v) in self.entries() {
            out[c] = v;
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.entries().all(|(_, v)| v.is_finite())
    }
}

/// A fitted feature pipeline bound to its resources.
#[derive(Debug, Clone)]
pub struct FeaturePipeline {
    parts: FittedParts,
    resources: FeatureResources,
    scorer: Option<Arc<dyn SentimentScorer>>,
    counters: PatternCounters,
    scaled_width: usize,
    fingerprint: Arc<str>,
}

struct Analysis<'a> {
    body: &'a str,
    tokens: Vec<text::Token>,
    sentences: Option<Vec<text::Sentence>>,
}

impl FeaturePipeline {
    /// Fit TF-IDF, the scaler and the rank vocabulary on `posts`.
    pub fn fit(
        posts: &[LabeledPost],
        config: &FeatureConfig,
        resources: FeatureResources,
    ) -> Result<Self> {
        if posts.is_empty() {
            return Err(FeatureError::EmptyCorpus.into());
        }
        let tfidf = if config.tfidf {
            let bodies: Vec<&str> = posts.iter().map(|p| p.body.as_str()).collect();
            Some(TfidfModel::fit(
                &bodies,
                config.tfidf_max_features,
                (1, config.tfidf_max_ngram.max(1)),
            )?)
        } else {
            None
        };
        let rank_vocab = if config.user_rank {
            let mut ranks: Vec<String> = posts.iter().map(|p| p.author_rank.clone()).collect();
            ranks.sort_unstable();
            ranks.dedup();
            ranks
        } else {
            Vec::new()
        };

        let mut pipeline = Self::assemble_parts(
            FittedParts {
                config: config.clone(),
                tfidf,
                scaler: ScalerModel::fit(&[], 0),
                rank_vocab,
                dense_names: Vec::new(),
            },
            resources,
        )?;
        let raw: Vec<Vec<f64>> = posts.par_iter().map(|p| pipeline.raw_dense(p)).collect();
        pipeline.parts.scaler = ScalerModel::fit(&raw, pipeline.scaled_width);
        pipeline.fingerprint = pipeline.compute_fingerprint();
        Ok(pipeline)
    }

    /// Rebind saved parts to resources. Fails if a required resource is
    /// missing; a resource that differs from the one used at fit time shows
    /// up as a different [`fingerprint`](Self::fingerprint).
    pub fn from_parts(parts: FittedParts, resources: FeatureResources) -> Result<Self> {
        let saved_names = parts.dense_names.clone();
        let pipeline = Self::assemble_parts(parts, resources)?;
        if pipeline.parts.dense_names != saved_names {
            return Err(FeatureError::LayoutMismatch {
                saved: saved_names.len(),
                current: pipeline.parts.dense_names.len(),
            }
            .into());
        }
        Ok(pipeline)
    }

    fn assemble_parts(mut parts: FittedParts, resources: FeatureResources) -> Result<Self> {
        let config = &parts.config;
        if config.tfidf && parts.tfidf.is_none() {
            return Err(FeatureError::MissingState {
                block: "tfidf",
                missing: "a fitted TF-IDF model",
            }
            .into());
        }
        if config.embeddings && resources.embeddings.is_none() {
            return Err(FeatureError::MissingState {
                block: "embeddings",
                missing: "an embedding table",
            }
            .into());
        }
        if config.lexicons && resources.lexicons.is_empty() {
            return Err(FeatureError::MissingState {
                block: "lexicons",
                missing: "a lexicon set",
            }
            .into());
        }
        let scorer = if config.sentiment || config.heuristics {
            Some(resources.scorer()?)
        } else {
            None
        };

        let mut names = Vec::new();
        if config.lexicons {
            for loaded in resources.lexicons.iter() {
                let lex = &loaded.lexicon;
                for c in lex.categories() {
                    names.push(format!("lex:{}:{c}", lex.name()));
                }
                if loaded.weighted {
                    for c in lex.categories() {
                        names.push(format!("lexw:{}:{c}", lex.name()));
                    }
                }
            }
        }
        if config.surface {
            names.extend(PRONOUNS.iter().map(|p| format!("pron:{p}")));
            names.push("surface:mean_word_length".into());
            names.push("surface:web_links".into());
        }
        if config.patterns {
            names.extend(PatternSet::ALL.iter().map(|s| format!("pattern:{s}")));
        }
        if config.sentiment {
            names.push("sentiment".into());
        }
        if let (true, Some(table)) = (config.embeddings, &resources.embeddings) {
            names.extend((0..table.dim()).map(|i| format!("emb:post:{i}")));
            names.extend((0..table.dim()).map(|i| format!("emb:last:{i}")));
        }
        if config.heuristics {
            names.extend(resources.heuristics.feature_names());
        }
        let scaled_width = names.len();
        if config.user_rank {
            names.extend(parts.rank_vocab.iter().map(|r| format!("rank:{r}")));
            names.push(OTHER_RANK.into());
        }
        if parts.scaler.width() != scaled_width && parts.scaler.width() != 0 {
            return Err(FeatureError::LayoutMismatch {
                saved: parts.scaler.width(),
                current: scaled_width,
            }
            .into());
        }
        parts.dense_names = names;

        let mut pipeline = FeaturePipeline {
            parts,
            resources,
            scorer,
            counters: PatternCounters::default(),
            scaled_width,
            fingerprint: Arc::from(""),
        };
        pipeline.fingerprint = pipeline.compute_fingerprint();
        Ok(pipeline)
    }

    fn compute_fingerprint(&self) -> Arc<str> {
        let config = &self.parts.config;
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(&self.parts).expect("fitted parts serialize"));
        if config.lexicons {
            h.update(b"lexicons:");
            h.update(self.resources.lexicons.digest().as_bytes());
            if config.negation {
                for t in self.resources.negation.iter() {
                    h.update(t.as_bytes());
                    h.update([0u8]);
                }
            }
        }
        if let Some(scorer) = &self.scorer {
            h.update(b"scorer:");
            h.update(scorer.identity().as_bytes());
        }
        if let (true, Some(table)) = (config.embeddings, &self.resources.embeddings) {
            h.update(b"embeddings:");
            h.update(table.digest().as_bytes());
        }
        if config.heuristics {
            h.update(b"heuristics:");
            h.update(self.resources.heuristics.identity().as_bytes());
        }
        Arc::from(&hex(&h.finalize())[..16])
    }

    pub fn parts(&self) -> &FittedParts {
        &self.parts
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.parts.config
    }

    pub fn resources(&self) -> &FeatureResources {
        &self.resources
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn tfidf_width(&self) -> usize {
        self.parts.tfidf.as_ref().map_or(0, TfidfModel::len)
    }

    pub fn dim(&self) -> usize {
        self.tfidf_width() + self.parts.dense_names.len()
    }

    /// Name of every column, TF-IDF columns as `tfidf:<n-gram>`.
    pub fn column_names(&self) -> Vec<String> {
        let mut names = vec![String::new(); self.tfidf_width()];
        if let Some(t) = &self.parts.tfidf {
            for (term, col) in t.vocabulary() {
                names[col] = format!("tfidf:{term}");
            }
        }
        names.extend(self.parts.dense_names.iter().cloned());
        names
    }

    pub fn dense_names(&self) -> &[String] {
        &self.parts.dense_names
    }

    fn analyze<'a>(&self, body: &'a str) -> Analysis<'a> {
        let config = &self.parts.config;
        let tokens = text::tokenize(body);
        let sentences =
            (config.embeddings || config.heuristics).then(|| text::split_sentences(body));
        Analysis {
            body,
            tokens,
            sentences,
        }
    }

    /// Unscaled dense features, rank columns excluded.
    fn raw_dense(&self, post: &LabeledPost) -> Vec<f64> {
        let a = self.analyze(&post.body);
        self.raw_dense_from(&a)
    }

    fn raw_dense_from(&self, a: &Analysis<'_>) -> Vec<f64> {
        let config = &self.parts.config;
        let mut out = Vec::with_capacity(self.scaled_width);
        if config.lexicons {
            let negation = if config.negation {
                self.resources.negation.clone()
            } else {
                NegationList::disabled()
            };
            for loaded in self.resources.lexicons.iter() {
                let counts = loaded.lexicon.scan(&a.tokens, &negation);
                out.extend(
                    loaded
                        .lexicon
                        .categories()
                        .iter()
                        .map(|c| counts.count(c) as f64),
                );
                if loaded.weighted {
                    out.extend(loaded.lexicon.categories().iter().map(|c| counts.weight(c)));
                }
            }
        }
        if config.surface {
            let s = surface_stats_tokens(&a.tokens);
            out.extend(s.pronouns.iter().map(|&c| c as f64));
            out.push(s.mean_word_length);
            out.push(s.web_links as f64);
        }
        let normalized = (config.patterns || config.heuristics).then(|| normalize_text(a.body));
        if config.patterns {
            let counts = self
                .counters
                .count_all_normalized(normalized.as_deref().unwrap_or_default());
            out.extend(counts.iter().map(|&c| c as f64));
        }
        if config.sentiment {
            let scorer = self
                .scorer
                .as_ref()
                .expect("scorer present when sentiment is on");
            out.push(scorer.score(&a.tokens).clamp(-1.0, 1.0));
        }
        if let (true, Some(table)) = (config.embeddings, &self.resources.embeddings) {
            let e = embed_tokens(&a.tokens, a.sentences.as_deref().unwrap_or_default(), table);
            out.extend(e.post);
            out.extend(e.last_sentence);
        }
        if config.heuristics {
            let scorer = self
                .scorer
                .as_ref()
                .expect("scorer present when heuristics are on");
            out.extend(self.resources.heuristics.extract(
                a.body,
                &a.tokens,
                a.sentences.as_deref().unwrap_or_default(),
                scorer.as_ref(),
            ));
        }
        debug_assert_eq!(out.len(), self.scaled_width);
        out
    }

    /// Feature vector of one post.
    pub fn transform_one(&self, post: &LabeledPost) -> FeatureVector {
        let a = self.analyze(&post.body);
        let sparse = self
            .parts
            .tfidf
            .as_ref()
            .map(|t| t.transform_tokens(&a.tokens))
            .unwrap_or_default();
        let mut dense = self.raw_dense_from(&a);
        self.parts.scaler.transform_in_place(&mut dense);
        if self.parts.config.user_rank {
            let slot = self
                .parts
                .rank_vocab
                .binary_search(&post.author_rank)
                .unwrap_or(self.parts.rank_vocab.len());
            let start = dense.len();
            dense.resize(start + self.parts.rank_vocab.len() + 1, 0.0);
            dense[start + slot] = 1.0;
        }
        FeatureVector {
            sparse,
            dense,
            dense_offset: self.tfidf_width(),
            fingerprint: self.fingerprint.clone(),
        }
    }

    /// Feature vectors of many posts, computed in parallel, in input order.
    pub fn transform(&self, posts: &[LabeledPost]) -> Vec<FeatureVector> {
        posts.par_iter().map(|p| self.transform_one(p)).collect()
    }
}

/// One-shot helper: feature vector of `post` under a fitted pipeline.
pub fn assemble(post: &LabeledPost, pipeline: &FeaturePipeline) -> FeatureVector {
    pipeline.transform_one(post)
}
