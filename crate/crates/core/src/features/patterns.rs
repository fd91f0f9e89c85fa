//! Literal phrase counting over lowercased post text.
//!
//! Phrases are matched against the raw text rather than tokens so phone
//! numbers such as `13 11 14` and URLs match as written. A match must start
//! and end on a word boundary (no letter or digit directly outside it).
//! Scanning is left to right; at each position the longest phrase wins and
//! the scan resumes after it, so nested phrases are never counted twice.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::FeatureError;

pub const HELPLINES: &[&str] = &[
    "mental health",
    "australia",
    "general practitioner",
    "doctor",
    "psychologist",
    "counsellor",
    "gp",
    "emergency",
    "000",
    "lifeline",
    "131114",
    "13 11 14",
    "kids help line",
    "1800 55 1800",
    "1800551800",
    "salvation army care line",
    "1300 36 36 22",
    "1300363622",
    "e-couch",
    "moodgym",
    "bluepages",
    "black dog institute",
    "reachout",
    "beyondblue",
    "www.moodgym.anu.edu.au",
    "www.ecouch.anu.edu.au",
    "www.bluepages.anu.edu.au",
    "www.researchout.org.au",
    "www.blackdoginstitute.org.au",
];

pub const SELF_HARM: &[&str] = &[
    "suicide",
    "kill myself",
    "kill my self",
    "cut myself",
    "cut my self",
    "hurt myself",
    "hurt my self",
    "harm myself",
    "harm my self",
    "i want to die",
    "don't want to live",
    "end my life",
    "kill",
    "hurt",
    "cut",
    "want to die",
    "i don't want to live",
];

pub const ADVISORS: &[&str] = &[
    "supervisor",
    "supervisors",
    "mentor",
    "manager",
    "tutor",
    "case-manager",
    "managers",
    "psych",
    "psychiatrist",
    "gp",
    "gps",
    "counsellor",
    "counselor",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternSet {
    Helplines,
    SelfHarm,
    Advisors,
}

impl PatternSet {
    pub const ALL: [PatternSet; 3] = [
        PatternSet::Helplines,
        PatternSet::SelfHarm,
        PatternSet::Advisors,
    ];

    pub fn phrases(self) -> &'static [&'static str] {
        match self {
            PatternSet::Helplines => HELPLINES,
            PatternSet::SelfHarm => SELF_HARM,
            PatternSet::Advisors => ADVISORS,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PatternSet::Helplines => "helplines",
            PatternSet::SelfHarm => "self_harm",
            PatternSet::Advisors => "advisors",
        }
    }
}

impl fmt::Display for PatternSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PatternSet {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "helplines" => Ok(PatternSet::Helplines),
            "self_harm" | "self-harm" => Ok(PatternSet::SelfHarm),
            "advisors" => Ok(PatternSet::Advisors),
            _ => Err(FeatureError::UnknownPatternSet(s.to_string())),
        }
    }
}

/// Longest-first, non-overlapping phrase counter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhraseMatcher {
    /// Deduplicated, lowercased, longest first.
    phrases: Vec<String>,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Lowercase and fold typographic apostrophes to ASCII.
pub fn normalize_text(text: &str) -> String {
    text.to_lowercase().replace('\u{2019}', "'")
}

impl PhraseMatcher {
    pub fn new<I, S>(phrases: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut phrases: Vec<String> = phrases
            .into_iter()
            .map(|p| normalize_text(p.as_ref().trim()))
            .filter(|p| !p.is_empty())
            .collect();
        phrases.sort_unstable_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        phrases.dedup();
        PhraseMatcher { phrases }
    }

    pub fn for_set(set: PatternSet) -> Self {
        Self::new(set.phrases())
    }

    pub fn phrases(&self) -> &[String] {
        &self.phrases
    }

    /// Matched phrases in text order. `text` must already be normalized.
    pub fn find_normalized<'a>(&'a self, text: &str) -> Vec<&'a str> {
        let mut found = Vec::new();
        let mut pos = 0;
        let mut prev: Option<char> = None;
        while pos < text.len() {
            let rest = &text[pos..];
            let at_boundary = prev.is_none_or(|c| !is_word_char(c));
            let hit = if at_boundary {
                self.phrases.iter().find(|p| {
                    rest.starts_with(p.as_str())
                        && rest[p.len()..]
                            .chars()
                            .next()
                            .is_none_or(|c| !is_word_char(c))
                })
            } else {
                None
            };
            match hit {
                Some(p) => {
                    found.push(p.as_str());
                    prev = p.chars().last();
                    pos += p.len();
                }
                None => {
                    let c = rest.chars().next().expect("pos is inside text");
                    prev = Some(c);
                    pos += c.len_utf8();
                }
            }
        }
        found
    }

    pub fn count_normalized(&self, text: &str) -> usize {
        self.find_normalized(text).len()
    }

    pub fn count(&self, text: &str) -> usize {
        self.count_normalized(&normalize_text(text))
    }
}

/// Matchers for the three reference sets, built once.
#[derive(Debug, Clone)]
pub struct PatternCounters {
    matchers: [PhraseMatcher; 3],
}

impl Default for PatternCounters {
    fn default() -> Self {
        PatternCounters {
            matchers: PatternSet::ALL.map(PhraseMatcher::for_set),
        }
    }
}

impl PatternCounters {
    pub fn get(&self, set: PatternSet) -> &PhraseMatcher {
        &self.matchers[set as usize]
    }

    /// Counts for all three sets on already-normalized text, in
    /// [`PatternSet::ALL`] order.
    pub fn count_all_normalized(&self, text: &str) -> [usize; 3] {
        [0, 1, 2].map(|i| self.matchers[i].count_normalized(text))
    }
}

pub fn pattern_counts(post: &crate::LabeledPost, set: PatternSet) -> usize {
    PhraseMatcher::for_set(set).count(&post.body)
}
