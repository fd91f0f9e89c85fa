//! Lexicon resources and negation-aware category matching.
//!
//! A lexicon maps lowercased n-grams (up to trigrams) to one or more
//! categories with a weight. Matching walks the token stream and takes the
//! longest entry starting at each position; tokens consumed by a match are
//! not matched again by shorter entries.
//!
//! When the token immediately before a match is a negation term, the match
//! is either shifted to the opposite category (polarity-aware lexicons whose
//! polarity map covers the category) or dropped.

mod bundle;
mod negation;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, LexiconError, Result};
use crate::text;

pub use bundle::{LexiconEntryMeta, LexiconManifest, LexiconSet, LoadedLexicon};
pub use negation::{NegationList, DEFAULT_NEGATIONS};

/// Longest n-gram a lexicon entry may have.
pub const MAX_ORDER: usize = 3;

/// Load-time description of a lexicon.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LexiconMeta {
    pub name: String,
    #[serde(default)]
    pub polarity_aware: bool,
    #[serde(default)]
    pub polarity_map: BTreeMap<String, String>,
}

impl LexiconMeta {
    pub fn new(name: impl Into<String>) -> Self {
        LexiconMeta {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn polarity(mut self, pairs: &[(&str, &str)]) -> Self {
        self.polarity_aware = true;
        for (a, b) in pairs {
            self.polarity_map.insert(a.to_string(), b.to_string());
        }
        self
    }
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    meta: LexiconMeta,
    /// Space-joined n-gram -> category -> weight.
    entries: HashMap<String, BTreeMap<String, f64>>,
    categories: Vec<String>,
    max_order: usize,
}

impl Lexicon {
    /// Build from `(term, category, weight)` rows. Later rows for the same
    /// (term, category) replace earlier ones.
    pub fn from_entries<'a, I>(meta: LexiconMeta, rows: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = (&'a str, &'a str, f64)>,
    {
        let mut builder = Builder::new(meta)?;
        for (i, (term, category, weight)) in rows.into_iter().enumerate() {
            builder.insert(term, category, weight, i + 1)?;
        }
        Ok(builder.finish())
    }

    /// Parse tab-separated `term<TAB>category[<TAB>weight]` lines. Blank lines
    /// and lines starting with `#` are ignored; a missing weight is 1.0.
    pub fn parse(source: &str, meta: LexiconMeta) -> Result<Self, LexiconError> {
        let mut builder = Builder::new(meta)?;
        for (i, line) in source.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = line.trim_end_matches(['\r', '\n']);
            if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
                continue;
            }
            let mut cols = trimmed.split('\t');
            let term = cols.next().unwrap_or("");
            let Some(category) = cols.next().map(str::trim).filter(|c| !c.is_empty()) else {
                return Err(builder.malformed(line_no, "expected term<TAB>category[<TAB>weight]"));
            };
            let weight = match cols.next().map(str::trim) {
                None | Some("") => 1.0,
                Some(w) => w
                    .parse::<f64>()
                    .ok()
                    .filter(|w| w.is_finite())
                    .ok_or_else(|| {
                        builder.malformed(line_no, &format!("weight {w:?} is not a real number"))
                    })?,
            };
            if cols.next().is_some() {
                return Err(builder.malformed(line_no, "too many columns"));
            }
            builder.insert(term, category, weight, line_no)?;
        }
        Ok(builder.finish())
    }

    pub fn name(&self) -> &str {
        &self.meta.name
    }

    pub fn meta(&self) -> &LexiconMeta {
        &self.meta
    }

    pub fn is_polarity_aware(&self) -> bool {
        self.meta.polarity_aware
    }

    /// Opposite category, if this lexicon shifts `category` under negation.
    pub fn opposite(&self, category: &str) -> Option<&str> {
        if !self.meta.polarity_aware {
            return None;
        }
        self.meta.polarity_map.get(category).map(String::as_str)
    }

    /// Sorted category names, including every category named in the
    /// polarity map.
    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Longest entry, in tokens.
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Categories and weights of `term` (space-joined lowercase tokens).
    pub fn lookup(&self, term: &str) -> Option<&BTreeMap<String, f64>> {
        self.entries.get(term)
    }

    /// Hex SHA-256 over the metadata and sorted entries.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(serde_json::to_vec(&self.meta).unwrap_or_default());
        let sorted: BTreeMap<_, _> = self.entries.iter().collect();
        for (term, cats) in sorted {
            hasher.update(term.as_bytes());
            for (cat, w) in cats {
                hasher.update([0u8]);
                hasher.update(cat.as_bytes());
                hasher.update(w.to_le_bytes());
            }
            hasher.update([1u8]);
        }
        hex(&hasher.finalize())
    }

    /// Run the matcher over `tokens`, crediting categories per the negation
    /// rule. Unit counts and weight sums are accumulated together.
    pub fn scan<T: AsRef<str>>(&self, tokens: &[T], negation: &NegationList) -> CategoryCounts {
        let mut out = CategoryCounts::zeroed(&self.categories);
        let mut key = String::new();
        let mut i = 0;
        while i < tokens.len() {
            let longest = (1..=self.max_order.min(tokens.len() - i))
                .rev()
                .find_map(|n| {
                    key.clear();
                    for (j, t) in tokens[i..i + n].iter().enumerate() {
                        if j > 0 {
                            key.push(' ');
                        }
                        key.push_str(t.as_ref());
                    }
                    self.entries.get(key.as_str()).map(|cats| (n, cats))
                });
            let Some((n, cats)) = longest else {
                i += 1;
                continue;
            };
            let negated = i > 0 && negation.contains(tokens[i - 1].as_ref());
            for (category, &weight) in cats {
                let credited = if negated {
                    self.opposite(category)
                } else {
                    Some(category.as_str())
                };
                if let Some(c) = credited {
                    out.credit(c, weight);
                }
            }
            i += n;
        }
        out
    }
}

struct Builder {
    meta: LexiconMeta,
    entries: HashMap<String, BTreeMap<String, f64>>,
    max_order: usize,
}

impl Builder {
    fn new(mut meta: LexiconMeta) -> Result<Self, LexiconError> {
        if !meta.polarity_aware {
            meta.polarity_map.clear();
        }
        for (from, to) in &meta.polarity_map {
            let back = meta.polarity_map.get(to);
            if back != Some(from) {
                return Err(LexiconError::NotInvolution {
                    lexicon: meta.name.clone(),
                    from: from.clone(),
                    to: to.clone(),
                    back: back.cloned(),
                });
            }
        }
        Ok(Builder {
            meta,
            entries: HashMap::new(),
            max_order: 0,
        })
    }

    fn malformed(&self, line: usize, message: &str) -> LexiconError {
        LexiconError::Malformed {
            lexicon: self.meta.name.clone(),
            line,
            message: message.to_string(),
        }
    }

    fn insert(
        &mut self,
        term: &str,
        category: &str,
        weight: f64,
        line: usize,
    ) -> Result<(), LexiconError> {
        let tokens = text::tokenize(term);
        if tokens.is_empty() {
            return Err(self.malformed(line, "empty term"));
        }
        if tokens.len() > MAX_ORDER {
            return Err(LexiconError::TermTooLong {
                lexicon: self.meta.name.clone(),
                term: term.to_string(),
                tokens: tokens.len(),
            });
        }
        if !weight.is_finite() {
            return Err(self.malformed(line, "weight is not finite"));
        }
        self.max_order = self.max_order.max(tokens.len());
        let key = text::join(&tokens);
        self.entries
            .entry(key)
            .or_default()
            .insert(category.trim().to_string(), weight);
        Ok(())
    }

    fn finish(self) -> Lexicon {
        let mut categories: BTreeSet<String> = self
            .entries
            .values()
            .flat_map(|cats| cats.keys().cloned())
            .collect();
        categories.extend(self.meta.polarity_map.keys().cloned());
        Lexicon {
            meta: self.meta,
            entries: self.entries,
            categories: categories.into_iter().collect(),
            max_order: self.max_order,
        }
    }
}

/// Load a lexicon TSV file.
pub fn load_lexicon(path: impl AsRef<Path>, meta: LexiconMeta) -> Result<Lexicon> {
    let path = path.as_ref();
    let source = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(Lexicon::parse(&source, meta)?)
}

/// Per-category match counts and weight sums for one post.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub counts: BTreeMap<String, u64>,
    pub weighted: BTreeMap<String, f64>,
}

impl CategoryCounts {
    fn zeroed(categories: &[String]) -> Self {
        CategoryCounts {
            counts: categories.iter().map(|c| (c.clone(), 0)).collect(),
            weighted: categories.iter().map(|c| (c.clone(), 0.0)).collect(),
        }
    }

    fn credit(&mut self, category: &str, weight: f64) {
        *self.counts.entry(category.to_string()).or_default() += 1;
        *self.weighted.entry(category.to_string()).or_default() += weight;
    }

    pub fn count(&self, category: &str) -> u64 {
        self.counts.get(category).copied().unwrap_or(0)
    }

    pub fn weight(&self, category: &str) -> f64 {
        self.weighted.get(category).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Unit counts per category (see [`Lexicon::scan`]).
pub fn match_counts<T: AsRef<str>>(
    tokens: &[T],
    lexicon: &Lexicon,
    negation: &NegationList,
) -> CategoryCounts {
    lexicon.scan(tokens, negation)
}

/// Entry-weight sums per category. Same matching and negation rule as
/// [`match_counts`]; a shifted match moves its weight unchanged.
pub fn weighted_sum<T: AsRef<str>>(
    tokens: &[T],
    lexicon: &Lexicon,
    negation: &NegationList,
) -> CategoryCounts {
    lexicon.scan(tokens, negation)
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
