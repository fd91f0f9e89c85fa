//! Optional crisis-profile heuristics: hopelessness keywords, short/long
//! post flags, a negative-positive-negative emotion arc, dissatisfaction
//! with services, storytelling time markers and advice seeking.

use std::fmt;
use std::sync::Arc;

use super::patterns::{normalize_text, PatternSet, PhraseMatcher};
use super::sentiment::SentimentScorer;
use crate::text::{Sentence, Token, TokenKind};

pub const HOPELESSNESS: &[&str] = &[
    "feel tired",
    "fed up",
    "better dead",
    "give up life",
    "the end is near",
    "sick of life",
    "sick of existence",
    "holding on",
    "hopeless times",
    "hope",
    "trying help",
    "trying talking",
    "hard to try",
    "hard to do",
];

pub const COPING: &[&str] = &[
    "getting there",
    "i faced the world",
    "getting up and working",
];

pub const TEMPORAL: &[&str] = &["today", "yesterday", "tomorrow"];

pub const ADVICE_PHRASES: &[&str] = &[
    "any tips",
    "any good tips",
    "any advice",
    "has anyone",
    "what should",
];

const SECOND_PERSON: &[&str] = &["you", "your", "yours", "yourself", "yourselves"];

/// Posts with fewer words than this are short; at least this many, long.
pub const SHORT_WORDS: usize = 50;
/// Posts with at most this many sentences are short regardless of length.
pub const SHORT_SENTENCES: usize = 2;

pub const HEURISTIC_NAMES: [&str; 7] = [
    "heur:hopelessness",
    "heur:is_short",
    "heur:is_long",
    "heur:neg_pos_neg",
    "heur:service_dissatisfaction",
    "heur:temporal",
    "heur:advice_seeking",
];

/// External misspelling counter; when configured it adds a
/// `heur:misspellings` feature.
pub trait MisspellingCounter: Send + Sync + fmt::Debug {
    fn count(&self, tokens: &[Token]) -> usize;
    fn identity(&self) -> String;
}

#[derive(Debug, Clone)]
pub struct HeuristicBundle {
    hopelessness: PhraseMatcher,
    coping: PhraseMatcher,
    advice: PhraseMatcher,
    services: [PhraseMatcher; 2],
    temporal: Vec<String>,
    misspellings: Option<Arc<dyn MisspellingCounter>>,
}

impl Default for HeuristicBundle {
    fn default() -> Self {
        HeuristicBundle {
            hopelessness: PhraseMatcher::new(HOPELESSNESS),
            coping: PhraseMatcher::new(COPING),
            advice: PhraseMatcher::new(ADVICE_PHRASES),
            services: [
                PhraseMatcher::for_set(PatternSet::Helplines),
                PhraseMatcher::for_set(PatternSet::Advisors),
            ],
            temporal: TEMPORAL.iter().map(|s| s.to_string()).collect(),
            misspellings: None,
        }
    }
}

impl HeuristicBundle {
    pub fn with_misspelling_counter(mut self, counter: Arc<dyn MisspellingCounter>) -> Self {
        self.misspellings = Some(counter);
        self
    }

    pub fn feature_names(&self) -> Vec<String> {
        let mut names: Vec<String> = HEURISTIC_NAMES.iter().map(|s| s.to_string()).collect();
        if self.misspellings.is_some() {
            names.push("heur:misspellings".into());
        }
        names
    }

    pub fn identity(&self) -> String {
        let mut id = String::from("heuristics-v1");
        if let Some(m) = &self.misspellings {
            id.push(':');
            id.push_str(&m.identity());
        }
        id
    }

    /// Sign of one sentence: coping phrases count as positive, otherwise the
    /// scorer decides. 0 means neutral.
    fn sentence_sign(&self, sentence: &Sentence, scorer: &dyn SentimentScorer) -> i8 {
        if self.coping.count(&sentence.text) > 0 {
            return 1;
        }
        let s = scorer.score(&sentence.tokens);
        if s > 0.0 {
            1
        } else if s < 0.0 {
            -1
        } else {
            0
        }
    }

    /// Feature values aligned with [`feature_names`](Self::feature_names).
    pub fn extract(
        &self,
        body: &str,
        tokens: &[Token],
        sentences: &[Sentence],
        scorer: &dyn SentimentScorer,
    ) -> Vec<f64> {
        let normalized = normalize_text(body);
        let words = tokens.iter().filter(|t| t.kind != TokenKind::Punct).count();
        let flag = |b: bool| if b { 1.0 } else { 0.0 };

        let hopelessness = self.hopelessness.count_normalized(&normalized) as f64;
        let is_short = words < SHORT_WORDS || sentences.len() <= SHORT_SENTENCES;
        let is_long = words >= SHORT_WORDS;

        let signs: Vec<i8> = sentences
            .iter()
            .map(|s| self.sentence_sign(s, scorer))
            .filter(|&s| s != 0)
            .collect();
        let neg_pos_neg = contains_subsequence(&signs, &[-1, 1, -1]);

        let service_mentions: usize = self
            .services
            .iter()
            .map(|m| m.count_normalized(&normalized))
            .sum();
        let dissatisfied = service_mentions >= 1 && scorer.score(tokens) < 0.0;

        let temporal = tokens
            .iter()
            .filter(|t| self.temporal.contains(&t.text))
            .count() as f64;

        let question = tokens
            .iter()
            .any(|t| t.kind == TokenKind::Punct && t.text == "?");
        let second_person = tokens
            .iter()
            .any(|t| SECOND_PERSON.contains(&t.text.as_str()));
        let any_question = sentences.iter().any(|s| {
            s.tokens.first().is_some_and(|t| t.text == "any")
                && s.tokens.last().is_some_and(|t| t.text == "?")
        });
        let advice = question
            && (second_person || any_question || self.advice.count_normalized(&normalized) > 0);

        let mut out = vec![
            hopelessness,
            flag(is_short),
            flag(is_long),
            flag(neg_pos_neg),
            flag(dissatisfied),
            temporal,
            flag(advice),
        ];
        if let Some(m) = &self.misspellings {
            out.push(m.count(tokens) as f64);
        }
        out
    }
}

fn contains_subsequence(haystack: &[i8], needle: &[i8]) -> bool {
    let mut it = haystack.iter();
    needle.iter().all(|n| it.any(|h| h == n))
}

/// Named heuristic features for one post.
pub fn crisis_heuristics(
    post: &crate::LabeledPost,
    bundle: &HeuristicBundle,
    scorer: &dyn SentimentScorer,
) -> Vec<(String, f64)> {
    let tokens = crate::text::tokenize(&post.body);
    let sentences = crate::text::split_sentences(&post.body);
    bundle
        .feature_names()
        .into_iter()
        .zip(bundle.extract(&post.body, &tokens, &sentences, scorer))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::sentiment::LexiconRatioScorer;
    use crate::lexicons::{LexiconSet, NegationList};
    use crate::LabeledPost;

    fn run(body: &str) -> std::collections::BTreeMap<String, f64> {
        let set = LexiconSet::builtin();
        let scorer =
            LexiconRatioScorer::new(set.get("mpqa").unwrap().clone(), NegationList::default());
        crisis_heuristics(
            &LabeledPost::unlabeled("p", body),
            &HeuristicBundle::default(),
            &scorer,
        )
        .into_iter()
        .collect()
    }

    #[test]
    fn two_sentence_post_is_short() {
        let f = run("I'm suffocating. I don't know if I can do this anymore.");
        assert_eq!(f["heur:is_short"], 1.0);
        assert_eq!(f["heur:is_long"], 0.0);
    }

    #[test]
    fn any_good_tips_is_advice_seeking() {
        assert_eq!(run("Any good tips?")["heur:advice_seeking"], 1.0);
        assert_eq!(run("Any good tips.")["heur:advice_seeking"], 0.0);
        assert_eq!(run("what do you think?")["heur:advice_seeking"], 1.0);
    }

    #[test]
    fn neutral_long_post() {
        let sentence = "the bus came to the stop near the old station and then it left again";
        let body = format!("{sentence}. {sentence}. {sentence}. {sentence}.");
        assert_eq!(
            crate::text::tokenize(&body)
                .iter()
                .filter(|t| t.is_word())
                .count(),
            60
        );
        let f = run(&body);
        assert_eq!(f["heur:is_long"], 1.0);
        for (name, value) in &f {
            if name != "heur:is_long" {
                assert_eq!(*value, 0.0, "{name}");
            }
        }
    }

    #[test]
    fn emotion_arc_detected() {
        let f =
            run("I feel awful and sad. Getting there though, I smiled at work. Still so hopeless.");
        assert_eq!(f["heur:neg_pos_neg"], 1.0);
        let f = run("I feel awful. Still sad.");
        assert_eq!(f["heur:neg_pos_neg"], 0.0);
    }

    #[test]
    fn service_dissatisfaction_and_keywords() {
        let f = run("My gp was useless and I feel awful. I'm fed up, yesterday was bad");
        assert_eq!(f["heur:service_dissatisfaction"], 1.0);
        assert_eq!(f["heur:hopelessness"], 1.0);
        assert_eq!(f["heur:temporal"], 1.0);
        let f = run("My gp was great and helpful");
        assert_eq!(f["heur:service_dissatisfaction"], 0.0);
    }

    #[derive(Debug)]
    struct CountZ;
    impl MisspellingCounter for CountZ {
        fn count(&self, tokens: &[Token]) -> usize {
            tokens.iter().filter(|t| t.text.contains('z')).count()
        }
        fn identity(&self) -> String {
            "count-z".into()
        }
    }

    #[test]
    fn misspelling_hook_adds_feature() {
        let bundle = HeuristicBundle::default().with_misspelling_counter(Arc::new(CountZ));
        let set = LexiconSet::builtin();
        let scorer =
            LexiconRatioScorer::new(set.get("mpqa").unwrap().clone(), NegationList::default());
        let f = crisis_heuristics(
            &LabeledPost::unlabeled("p", "zzz fizz ok"),
            &bundle,
            &scorer,
        );
        assert_eq!(f.last().unwrap(), &("heur:misspellings".to_string(), 2.0));
    }
}
