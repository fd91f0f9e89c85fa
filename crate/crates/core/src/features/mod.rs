//! Feature extraction: TF-IDF, lexicon counts, surface statistics, pattern
//! counts, sentiment, embeddings, user rank and crisis heuristics, combined
//! by a fitted [`FeaturePipeline`].

pub mod config;
pub mod embedding;
pub mod heuristics;
pub mod patterns;
pub mod pipeline;
pub mod scaler;
pub mod sentiment;
pub mod surface;
pub mod tfidf;

pub use config::{FeatureConfig, FeaturePreset};
pub use embedding::{embed_post, EmbeddingTable, PostEmbedding};
pub use heuristics::{crisis_heuristics, HeuristicBundle, MisspellingCounter};
pub use patterns::{pattern_counts, PatternSet, PhraseMatcher};
pub use pipeline::{assemble, FeaturePipeline, FeatureResources, FeatureVector, FittedParts};
pub use scaler::ScalerModel;
pub use sentiment::{sentiment_score, LexiconRatioScorer, SentimentScorer};
pub use surface::{surface_stats, SurfaceStats};
pub use tfidf::{fit_tfidf, tfidf_vector, TfidfModel};

#[cfg(test)]
mod tests;
