//! Severity triage for peer-support forum posts.
//!
//! Posts are mapped to one of four severities (green, amber, red, crisis)
//! using features computed from the post text alone: negation-aware lexicon
//! counts, TF-IDF n-grams, surface statistics, keyword-pattern counts and
//! averaged word embeddings. A one-vs-rest linear SVM is the main classifier;
//! multinomial Naive Bayes and KNN are provided as baselines.
//!
//! Module map:
//!
//! - [`corpus`]: labeled post loading, label statistics, stratified folds
//! - [`text`]: tokenization, sentence splitting, n-grams
//! - [`lexicons`]: lexicon resources and negation-aware matching
//! - [`features`]: feature blocks and the fitted feature pipeline
//! - [`classify`]: SVM, Naive Bayes, KNN and cross-validated grid search
//! - [`eval`]: confusion matrices, the four triage metrics, ablation runs
//! - [`model`]: the versioned model file
//! - [`synth`]: seeded synthetic corpus with planted per-label signals
//! - [`cli`]: the `triage` command-line tool

pub mod classify;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod lexicons;
pub mod model;
pub mod synth;
pub mod text;

pub use corpus::{LabeledPost, TriageLabel};
pub use error::{Error, Result};
