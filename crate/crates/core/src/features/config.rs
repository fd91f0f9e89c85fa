use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::tfidf::DEFAULT_MAX_FEATURES;
use crate::error::FeatureError;

/// Which feature blocks are enabled, plus block parameters.
///
/// Vector layout, in order: TF-IDF columns, then the z-scored dense block
/// (lexicons, surface, patterns, sentiment, embeddings, heuristics), then the
/// user-rank one-hot columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub tfidf: bool,
    pub tfidf_max_features: usize,
    /// Largest n-gram order for TF-IDF terms (smallest is always 1).
    pub tfidf_max_ngram: usize,
    pub lexicons: bool,
    /// Apply negation cues in the lexicon block.
    pub negation: bool,
    pub surface: bool,
    pub patterns: bool,
    pub sentiment: bool,
    pub embeddings: bool,
    pub user_rank: bool,
    pub heuristics: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            tfidf: false,
            tfidf_max_features: DEFAULT_MAX_FEATURES,
            tfidf_max_ngram: 2,
            lexicons: false,
            negation: false,
            surface: false,
            patterns: false,
            sentiment: false,
            embeddings: false,
            user_rank: false,
            heuristics: false,
        }
    }
}

impl FeatureConfig {
    pub fn enabled_blocks(&self) -> Vec<&'static str> {
        [
            (self.tfidf, "tfidf"),
            (self.lexicons, "lexicons"),
            (self.surface, "surface"),
            (self.patterns, "patterns"),
            (self.sentiment, "sentiment"),
            (self.embeddings, "embeddings"),
            (self.heuristics, "heuristics"),
            (self.user_rank, "user_rank"),
        ]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect()
    }
}

/// Named feature configurations used by the ablation harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeaturePreset {
    OnlyLexicons,
    LexiconsNegation,
    TfidfLexicons,
    TfidfLexiconsNegation,
    /// Every text feature: TF-IDF, lexicons with negation, surface
    /// statistics, pattern counts, sentiment, embeddings and user rank.
    Full,
    /// `Full` plus the crisis heuristics.
    FullHeuristics,
}

impl FeaturePreset {
    /// The five standard ablation rows, in report order.
    pub const STANDARD: [FeaturePreset; 5] = [
        FeaturePreset::OnlyLexicons,
        FeaturePreset::LexiconsNegation,
        FeaturePreset::TfidfLexicons,
        FeaturePreset::TfidfLexiconsNegation,
        FeaturePreset::Full,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeaturePreset::OnlyLexicons => "only-lexicons",
            FeaturePreset::LexiconsNegation => "lexicons-negation",
            FeaturePreset::TfidfLexicons => "tfidf-lexicons",
            FeaturePreset::TfidfLexiconsNegation => "tfidf-lexicons-negation",
            FeaturePreset::Full => "full",
            FeaturePreset::FullHeuristics => "full-heuristics",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            FeaturePreset::OnlyLexicons => "Only lexicons",
            FeaturePreset::LexiconsNegation => "Lexicons with negation",
            FeaturePreset::TfidfLexicons => "TF-IDF + lexicons",
            FeaturePreset::TfidfLexiconsNegation => "TF-IDF + lexicons with negation",
            FeaturePreset::Full => "All text features",
            FeaturePreset::FullHeuristics => "All text features + crisis heuristics",
        }
    }

    pub fn config(self) -> FeatureConfig {
        let lexicons = FeatureConfig {
            lexicons: true,
            ..FeatureConfig::default()
        };
        match self {
            FeaturePreset::OnlyLexicons => lexicons,
            FeaturePreset::LexiconsNegation => FeatureConfig {
                negation: true,
                ..lexicons
            },
            FeaturePreset::TfidfLexicons => FeatureConfig {
                tfidf: true,
                ..lexicons
            },
            FeaturePreset::TfidfLexiconsNegation => FeatureConfig {
                tfidf: true,
                negation: true,
                ..lexicons
            },
            FeaturePreset::Full => FeatureConfig {
                tfidf: true,
                negation: true,
                surface: true,
                patterns: true,
                sentiment: true,
                embeddings: true,
                user_rank: true,
                ..lexicons
            },
            FeaturePreset::FullHeuristics => FeatureConfig {
                heuristics: true,
                ..FeaturePreset::Full.config()
            },
        }
    }
}

impl fmt::Display for FeaturePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeaturePreset {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            FeaturePreset::OnlyLexicons,
            FeaturePreset::LexiconsNegation,
            FeaturePreset::TfidfLexicons,
            FeaturePreset::TfidfLexiconsNegation,
            FeaturePreset::Full,
            FeaturePreset::FullHeuristics,
        ]
        .into_iter()
        .find(|p| p.name() == s)
        .ok_or_else(|| FeatureError::UnknownPreset(s.to_string()))
    }
}
