//! Word-vector tables and averaged post / last-sentence representations.
//!
//! Tables use the plain-text word-vector layout: a `count dim` header line,
//! then one `word v1 ... vd` line per word.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, FeatureError, Result};
use crate::lexicons::hex;
use crate::text::{self, Token};

const TINY_TABLE: &str = include_str!("../../resources/embeddings/tiny.vec");

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    /// Build from `(word, vector)` pairs. Words are lowercased; on collision
    /// the first vector is kept.
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self, FeatureError>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: AsRef<str>,
    {
        let mut dim = None;
        let mut vectors = HashMap::new();
        for (i, (word, vector)) in pairs.into_iter().enumerate() {
            let line = i + 1;
            check_vector(&vector, *dim.get_or_insert(vector.len()), line)?;
            vectors
                .entry(word.as_ref().to_lowercase())
                .or_insert(vector);
        }
        Ok(EmbeddingTable {
            dim: dim.unwrap_or(0),
            vectors,
        })
    }

    pub fn parse(source: &str) -> Result<Self, FeatureError> {
        let mut lines = source
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let bad = |line: usize, message: String| FeatureError::Embedding { line, message };
        let (_, header) = lines
            .next()
            .ok_or_else(|| bad(1, "missing `count dim` header".into()))?;
        let mut head = header.split_whitespace().map(str::parse::<usize>);
        let (Some(Ok(count)), Some(Ok(dim)), None) = (head.next(), head.next(), head.next()) else {
            return Err(bad(
                1,
                format!("expected `count dim` header, got {header:?}"),
            ));
        };

        let mut vectors = HashMap::with_capacity(count);
        let mut rows = 0;
        for (i, line) in lines {
            let line_no = i + 1;
            let mut fields = line.split_whitespace();
            let word = fields.next().expect("line is not blank");
            let vector = fields
                .map(|f| f.parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| bad(line_no, e.to_string()))?;
            check_vector(&vector, dim, line_no)?;
            vectors.entry(word.to_lowercase()).or_insert(vector);
            rows += 1;
        }
        if rows != count {
            return Err(bad(
                1,
                format!("header declares {count} rows, found {rows}"),
            ));
        }
        Ok(EmbeddingTable { dim, vectors })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let source = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&source)?)
    }

    /// The bundled 10-word, 4-dimensional table.
    pub fn tiny() -> Self {
        Self::parse(TINY_TABLE).expect("bundled table parses")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    /// Mean vector of the in-table tokens; zero when none are in the table.
    pub fn average<T: AsRef<str>>(&self, tokens: &[T]) -> Vec<f64> {
        let mut sum = vec![0.0; self.dim];
        let mut hits = 0usize;
        for t in tokens {
            if let Some(v) = self.get(t.as_ref()) {
                for (s, x) in sum.iter_mut().zip(v) {
                    *s += x;
                }
                hits += 1;
            }
        }
        if hits > 0 {
            for s in &mut sum {
                *s /= hits as f64;
            }
        }
        sum
    }

    pub fn digest(&self) -> String {
        let mut words: Vec<&String> = self.vectors.keys().collect();
        words.sort_unstable();
        let mut hasher = Sha256::new();
        hasher.update((self.dim as u64).to_le_bytes());
        for w in words {
            hasher.update(w.as_bytes());
            for x in &self.vectors[w] {
                hasher.update(x.to_le_bytes());
            }
        }
        hex(&hasher.finalize())
    }
}

fn check_vector(vector: &[f64], dim: usize, line: usize) -> Result<(), FeatureError> {
    if vector.len() != dim {
        return Err(FeatureError::Embedding {
            line,
            message: format!("vector has {} components, expected {dim}", vector.len()),
        });
    }
    if vector.iter().any(|x| !x.is_finite()) {
        return Err(FeatureError::Embedding {
            line,
            message: "non-finite component".into(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PostEmbedding {
    pub post: Vec<f64>,
    pub last_sentence: Vec<f64>,
}

pub fn embed_tokens(
    tokens: &[Token],
    sentences: &[text::Sentence],
    table: &EmbeddingTable,
) -> PostEmbedding {
    PostEmbedding {
        post: table.average(tokens),
        last_sentence: sentences
            .last()
            .map_or_else(|| vec![0.0; table.dim()], |s| table.average(&s.tokens)),
    }
}

pub fn embed_post(post: &crate::LabeledPost, table: &EmbeddingTable) -> PostEmbedding {
    let tokens = text::tokenize(&post.body);
    let sentences = text::split_sentences(&post.body);
    embed_tokens(&tokens, &sentences, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::LabeledPost;

    fn ab() -> EmbeddingTable {
        EmbeddingTable::from_pairs([("a", vec![1.0, 0.0]), ("b", vec![0.0, 1.0])]).unwrap()
    }

    #[test]
    fn post_mean() {
        let e = embed_post(&LabeledPost::unlabeled("p", "a b"), &ab());
        assert_eq!(e.post, [0.5, 0.5]);
    }

    #[test]
    fn last_sentence_mean() {
        let e = embed_post(&LabeledPost::unlabeled("p", "a b. b"), &ab());
        assert_eq!(e.last_sentence, [0.0, 1.0]);
        assert!((e.post[0] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_table_is_zero() {
        let e = embed_post(&LabeledPost::unlabeled("p", "zzz"), &ab());
        assert_eq!(e.post, [0.0, 0.0]);
        assert_eq!(e.last_sentence, [0.0, 0.0]);
        let e = embed_post(&LabeledPost::unlabeled("p", ""), &ab());
        assert_eq!(e.last_sentence, [0.0, 0.0]);
    }

    #[test]
    fn parses_text_format() {
        let t = EmbeddingTable::parse("2 3\nHello 1 2 3\nworld 0.5 0 -1\n").unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.get("hello"), Some(&[1.0, 2.0, 3.0][..]));
        assert_eq!(EmbeddingTable::tiny().len(), 10);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let err = EmbeddingTable::parse("2 3\na 1 2 3\nb 1 2\n").unwrap_err();
        assert!(matches!(err, FeatureError::Embedding { line: 3, .. }));
        assert!(EmbeddingTable::from_pairs([("a", vec![1.0]), ("b", vec![1.0, 2.0])]).is_err());
        assert!(EmbeddingTable::parse("1 1\na nan\n").is_err());
        assert!(EmbeddingTable::parse("3 1\na 1\n").is_err());
    }
}
