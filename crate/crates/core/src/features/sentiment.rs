use std::fmt;

use crate::lexicons::{Lexicon, NegationList};
use crate::text::{self, Token};

/// Scores a token sequence on a scale from -1 (negative) to 1 (positive).
pub trait SentimentScorer: Send + Sync + fmt::Debug {
    fn score(&self, tokens: &[Token]) -> f64;

    /// Identifies the scorer in pipeline fingerprints; scorers that can
    /// return different values must use different identities.
    fn identity(&self) -> String;
}

/// `(pos - neg) / (pos + neg)` over negation-aware polarity counts, 0 when
/// no polarity word matches.
#[derive(Debug, Clone)]
pub struct LexiconRatioScorer {
    lexicon: Lexicon,
    negation: NegationList,
    positive: String,
    negative: String,
}

impl LexiconRatioScorer {
    pub fn new(lexicon: Lexicon, negation: NegationList) -> Self {
        Self::with_categories(lexicon, negation, "positive", "negative")
    }

    pub fn with_categories(
        lexicon: Lexicon,
        negation: NegationList,
        positive: impl Into<String>,
        negative: impl Into<String>,
    ) -> Self {
        LexiconRatioScorer {
            lexicon,
            negation,
            positive: positive.into(),
            negative: negative.into(),
        }
    }

    pub fn ratio(pos: u64, neg: u64) -> f64 {
        if pos + neg == 0 {
            0.0
        } else {
            (pos as f64 - neg as f64) / (pos + neg) as f64
        }
    }
}

impl SentimentScorer for LexiconRatioScorer {
    fn score(&self, tokens: &[Token]) -> f64 {
        let counts = self.lexicon.scan(tokens, &self.negation);
        Self::ratio(counts.count(&self.positive), counts.count(&self.negative))
    }

    fn identity(&self) -> String {
        let negations: Vec<&str> = self.negation.iter().collect();
        format!(
            "lexicon-ratio:{}:{}:{}:{}",
            self.lexicon.digest(),
            self.positive,
            self.negative,
            negations.join(",")
        )
    }
}

pub fn sentiment_score(post: &crate::LabeledPost, scorer: &dyn SentimentScorer) -> f64 {
    scorer.score(&text::tokenize(&post.body)).clamp(-1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicons::LexiconMeta;
    use crate::LabeledPost;

    fn scorer() -> LexiconRatioScorer {
        let lex = Lexicon::from_entries(
            LexiconMeta::new("mpqa")
                .polarity(&[("positive", "negative"), ("negative", "positive")]),
            [
                ("like", "positive", 1.0),
                ("good", "positive", 1.0),
                ("great", "positive", 1.0),
                ("sad", "negative", 1.0),
            ],
        )
        .unwrap();
        LexiconRatioScorer::new(lex, NegationList::default())
    }

    #[test]
    fn ratio_formula() {
        assert_eq!(LexiconRatioScorer::ratio(3, 1), 0.5);
        assert_eq!(LexiconRatioScorer::ratio(0, 0), 0.0);
        let post = LabeledPost::unlabeled("p", "good great like but sad");
        assert_eq!(sentiment_score(&post, &scorer()), 0.5);
    }

    #[test]
    fn neutral_post_scores_zero() {
        let post = LabeledPost::unlabeled("p", "the bus came at noon");
        assert_eq!(sentiment_score(&post, &scorer()), 0.0);
    }

    #[test]
    fn negated_positive_is_negative() {
        let post = LabeledPost::unlabeled("p", "i don't like it");
        assert_eq!(sentiment_score(&post, &scorer()), -1.0);
    }
}
