//! Labeled post collections: loading, label statistics and stratified folds.
//!
//! Corpora are JSON Lines (one object per line with `post_id`, `author_rank`,
//! `body`, `label`) or CSV with the header `post_id,author_rank,body,label`.
//! A missing, null or empty `label` means the post is unlabeled, which is
//! fine for prediction but rejected by training and evaluation.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CorpusError, Error, Result};

/// Triage severity, ordered from least to most urgent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TriageLabel {
    Green,
    Amber,
    Red,
    Crisis,
}

impl TriageLabel {
    /// All labels in severity order. Index `i` of this array has `index() == i`.
    pub const ALL: [TriageLabel; 4] = [
        TriageLabel::Green,
        TriageLabel::Amber,
        TriageLabel::Red,
        TriageLabel::Crisis,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TriageLabel::Green => "green",
            TriageLabel::Amber => "amber",
            TriageLabel::Red => "red",
            TriageLabel::Crisis => "crisis",
        }
    }

    /// Needs moderator action (anything but green).
    pub fn is_flagged(self) -> bool {
        self != TriageLabel::Green
    }

    /// Needs a prompt response (red or crisis).
    pub fn is_urgent(self) -> bool {
        matches!(self, TriageLabel::Red | TriageLabel::Crisis)
    }
}

impl fmt::Display for TriageLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TriageLabel {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "green" => Ok(TriageLabel::Green),
            "amber" => Ok(TriageLabel::Amber),
            "red" => Ok(TriageLabel::Red),
            "crisis" => Ok(TriageLabel::Crisis),
            _ => Err(CorpusError::UnknownLabel(s.to_string())),
        }
    }
}

impl Serialize for TriageLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for TriageLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One forum post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPost {
    pub post_id: String,
    /// Forum title of the author; may be empty.
    #[serde(default)]
    pub author_rank: String,
    pub body: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<TriageLabel>,
}

impl LabeledPost {
    pub fn new(
        post_id: impl Into<String>,
        author_rank: impl Into<String>,
        body: impl Into<String>,
        label: Option<TriageLabel>,
    ) -> Self {
        LabeledPost {
            post_id: post_id.into(),
            author_rank: author_rank.into(),
            body: body.into(),
            label,
        }
    }

    /// Unlabeled post with an empty author rank.
    pub fn unlabeled(post_id: impl Into<String>, body: impl Into<String>) -> Self {
        Self::new(post_id, "", body, None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl CorpusFormat {
    /// Guess from the file extension; anything that is not `.csv` is JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => CorpusFormat::Csv,
            _ => CorpusFormat::Jsonl,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(CorpusFormat::Jsonl),
            "csv" => Ok(CorpusFormat::Csv),
            _ => Err(CorpusError::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Deserialize)]
struct RawRecord {
    post_id: String,
    #[serde(default)]
    author_rank: Option<String>,
    body: String,
    #[serde(default)]
    label: Option<String>,
}

fn parse_label(raw: Option<&str>, line: usize) -> Result<Option<TriageLabel>, CorpusError> {
    match raw.map(str::trim) {
        None | Some("") => Ok(None),
        Some(s) => s.parse().map(Some).map_err(|_| CorpusError::Malformed {
            line,
            message: format!("unknown label {s:?}"),
        }),
    }
}

/// Load posts from `path` in file order.
pub fn load_posts(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Vec<LabeledPost>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_posts(BufReader::new(file), format)
}

/// Parse posts from any reader. Line numbers in errors are 1-based.
pub fn read_posts<R: Read>(reader: R, format: CorpusFormat) -> Result<Vec<LabeledPost>> {
    let records = match format {
        CorpusFormat::Jsonl => read_jsonl(reader)?,
        CorpusFormat::Csv => read_csv(reader)?,
    };
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut posts = Vec::with_capacity(records.len());
    for (line, post) in records {
        if let Some(&first_line) = seen.get(&post.post_id) {
            return Err(CorpusError::DuplicateId {
                post_id: post.post_id,
                first_line,
                second_line: line,
            }
            .into());
        }
        seen.insert(post.post_id.clone(), line);
        posts.push(post);
    }
    Ok(posts)
}

fn read_jsonl<R: Read>(reader: R) -> Result<Vec<(usize, LabeledPost)>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| CorpusError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        let label = parse_label(raw.label.as_deref(), line_no)?;
        out.push((
            line_no,
            LabeledPost {
                post_id: raw.post_id,
                author_rank: raw.author_rank.unwrap_or_default(),
                body: raw.body,
                label,
            },
        ));
    }
    Ok(out)
}

fn read_csv<R: Read>(reader: R) -> Result<Vec<(usize, LabeledPost)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CorpusError::Malformed {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (Some(id_col), Some(body_col)) = (column("post_id"), column("body")) else {
        return Err(CorpusError::Malformed {
            line: 1,
            message: "header must contain post_id and body".into(),
        }
        .into());
    };
    let rank_col = column("author_rank");
    let label_col = column("label");

    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| CorpusError::Malformed {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |col: Option<usize>| col.and_then(|c| record.get(c));
        let (Some(post_id), Some(body)) = (field(Some(id_col)), field(Some(body_col))) else {
            return Err(CorpusError::Malformed {
                line,
                message: "missing post_id or body".into(),
            }
            .into());
        };
        let label = parse_label(field(label_col), line)?;
        out.push((
            line,
            LabeledPost {
                post_id: post_id.to_string(),
                author_rank: field(rank_col).unwrap_or("").to_string(),
                body: body.to_string(),
                label,
            },
        ));
    }
    Ok(out)
}

/// Write posts in the given format; the output reloads to the same posts.
pub fn write_posts<W: Write>(writer: W, posts: &[LabeledPost], format: CorpusFormat) -> Result<()> {
    let to_corpus_err = |message: String| CorpusError::Malformed { line: 0, message };
    match format {
        CorpusFormat::Jsonl => {
            let mut w = std::io::BufWriter::new(writer);
            for post in posts {
                let line = serde_json::to_string(post).map_err(|e| to_corpus_err(e.to_string()))?;
                writeln!(w, "{line}").map_err(|e| to_corpus_err(e.to_string()))?;
            }
            w.flush().map_err(|e| to_corpus_err(e.to_string()))?;
        }
        CorpusFormat::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            w.write_record(["post_id", "author_rank", "body", "label"])
                .map_err(|e| to_corpus_err(e.to_string()))?;
            for post in posts {
                let label = post.label.map(TriageLabel::as_str).unwrap_or("");
                w.write_record([
                    post.post_id.as_str(),
                    post.author_rank.as_str(),
                    post.body.as_str(),
                    label,
                ])
                .map_err(|e| to_corpus_err(e.to_string()))?;
            }
            w.flush().map_err(|e| to_corpus_err(e.to_string()))?;
        }
    }
    Ok(())
}

/// Save posts to `path`.
pub fn save_posts(
    path: impl AsRef<Path>,
    posts: &[LabeledPost],
    format: CorpusFormat,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_posts(file, posts, format)
}

/// Labels of every post, or an error naming the first unlabeled one.
pub fn require_labels(posts: &[LabeledPost]) -> Result<Vec<TriageLabel>, CorpusError> {
    posts
        .iter()
        .map(|p| {
            p.label
                .ok_or_else(|| CorpusError::Unlabeled(p.post_id.clone()))
        })
        .collect()
}

/// Per-label counts of a labeled corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    /// Indexed by [`TriageLabel::index`].
    pub counts: [usize; 4],
    pub total: usize,
}

impl CorpusStats {
    pub fn count(&self, label: TriageLabel) -> usize {
        self.counts[label.index()]
    }

    pub fn percentage(&self, label: TriageLabel) -> f64 {
        100.0 * self.count(label) as f64 / self.total as f64
    }
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<8}{:>8}{:>9}", "label", "count", "%")?;
        for label in TriageLabel::ALL.iter().rev() {
            writeln!(
                f,
                "{:<8}{:>8}{:>9.2}",
                label.as_str(),
                self.count(*label),
                self.percentage(*label)
            )?;
        }
        write!(f, "{:<8}{:>8}", "total", self.total)
    }
}

pub fn corpus_stats(posts: &[LabeledPost]) -> Result<CorpusStats, CorpusError> {
    if posts.is_empty() {
        return Err(CorpusError::Empty);
    }
    let mut counts = [0usize; 4];
    for label in require_labels(posts)? {
        counts[label.index()] += 1;
    }
    Ok(CorpusStats {
        counts,
        total: posts.len(),
    })
}

/// Stratified fold index for every label in `labels`.
///
/// Each label's positions are shuffled with a generator seeded by `seed` and
/// dealt round-robin into folds. The dealing cursor carries over from one
/// label to the next so the overall fold sizes also stay within one.
pub fn stratified_fold_indices(
    labels: &[TriageLabel],
    k: usize,
    seed: u64,
) -> Result<Vec<usize>, CorpusError> {
    if k < 2 || k > labels.len() {
        return Err(CorpusError::InvalidFoldCount {
            k,
            total: labels.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![0usize; labels.len()];
    let mut cursor = 0usize;
    for label in TriageLabel::ALL {
        let mut members: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == label)
            .map(|(i, _)| i)
            .collect();
        members.shuffle(&mut rng);
        for idx in members {
            folds[idx] = cursor % k;
            cursor += 1;
        }
    }
    Ok(folds)
}

/// Stratified `k`-fold assignment, returned in corpus order as
/// `(post_id, fold)` pairs.
pub fn stratified_folds(
    posts: &[LabeledPost],
    k: usize,
    seed: u64,
) -> Result<Vec<(String, usize)>, CorpusError> {
    let labels = require_labels(posts)?;
    let folds = stratified_fold_indices(&labels, k, seed)?;
    Ok(posts
        .iter()
        .zip(folds)
        .map(|(p, f)| (p.post_id.clone(), f))
        .collect())
}
