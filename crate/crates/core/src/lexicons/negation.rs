use std::collections::BTreeSet;

/// The default negation cues.
pub const DEFAULT_NEGATIONS: [&str; 24] = [
    "no",
    "nobody",
    "nothing",
    "none",
    "never",
    "neither",
    "nor",
    "nowhere",
    "hardly",
    "scarcely",
    "barely",
    "don't",
    "isn't",
    "wasn't",
    "doesn't",
    "ain't",
    "can't",
    "won't",
    "wouldn't",
    "shouldn't",
    "couldn't",
    "hasn't",
    "haven't",
    "didn't",
];

/// Tokens that negate the lexicon match right after them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegationList {
    terms: BTreeSet<String>,
}

impl NegationList {
    pub fn new<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        NegationList {
            terms: terms
                .into_iter()
                .map(|t| normalize(&t.as_ref().to_lowercase()))
                .collect(),
        }
    }

    /// No negation handling: every match credits its own category.
    pub fn disabled() -> Self {
        NegationList {
            terms: BTreeSet::new(),
        }
    }

    /// Typographic apostrophes compare equal to ASCII ones.
    pub fn contains(&self, token: &str) -> bool {
        if self.terms.is_empty() {
            return false;
        }
        if token.contains('\u{2019}') {
            self.terms.contains(&normalize(token))
        } else {
            self.terms.contains(token)
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(String::as_str)
    }
}

impl Default for NegationList {
    fn default() -> Self {
        Self::new(DEFAULT_NEGATIONS)
    }
}

fn normalize(token: &str) -> String {
    token.replace('\u{2019}', "'")
}
