//! Tokenization, sentence splitting and n-grams.
//!
//! Every feature extractor sees the same token stream:
//!
//! - text is lowercased
//! - whitespace separates chunks; inside a chunk, runs of letters and digits
//!   form word tokens and every other character is its own token
//! - an apostrophe between two word characters stays inside the word, so
//!   `can't` is one token
//! - a chunk starting with `http://`, `https://` or `www.` is one URL token,
//!   minus any trailing punctuation, which is split off as usual

use std::ops::Range;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    Punct,
    Url,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// Lowercased surface form.
    pub text: String,
    pub kind: TokenKind,
    /// Byte range in the source text.
    pub span: Range<usize>,
}

impl Token {
    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }

    pub fn is_url(&self) -> bool {
        self.kind == TokenKind::Url
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.text
    }
}

const URL_PREFIXES: [&str; 3] = ["http://", "https://", "www."];
const URL_TRAILING: &[char] = &['.', ',', '!', '?', ';', ':', ')', ']', '}', '"', '\'', '>'];

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

fn is_url_chunk(chunk: &str) -> bool {
    let lower = chunk.to_lowercase();
    URL_PREFIXES.iter().any(|p| lower.starts_with(p))
}

pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    for (start, chunk) in chunks(text) {
        if is_url_chunk(chunk) {
            let core = chunk.trim_end_matches(URL_TRAILING);
            if !core.is_empty() {
                tokens.push(Token {
                    text: core.to_lowercase(),
                    kind: TokenKind::Url,
                    span: start..start + core.len(),
                });
            }
            for (i, c) in chunk[core.len()..].char_indices() {
                let s = start + core.len() + i;
                tokens.push(punct(c, s));
            }
        } else {
            split_chunk(chunk, start, &mut tokens);
        }
    }
    tokens
}

fn punct(c: char, start: usize) -> Token {
    Token {
        text: c.to_lowercase().collect(),
        kind: TokenKind::Punct,
        span: start..start + c.len_utf8(),
    }
}

/// Maximal non-whitespace runs with their byte offsets.
fn chunks(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = text.char_indices().peekable();
    std::iter::from_fn(move || {
        while let Some(&(_, c)) = rest.peek() {
            if !c.is_whitespace() {
                break;
            }
            rest.next();
        }
        let (start, _) = *rest.peek()?;
        let mut end = start;
        while let Some(&(i, c)) = rest.peek() {
            if c.is_whitespace() {
                break;
            }
            end = i + c.len_utf8();
            rest.next();
        }
        Some((start, &text[start..end]))
    })
}

fn split_chunk(chunk: &str, offset: usize, out: &mut Vec<Token>) {
    let chars: Vec<(usize, char)> = chunk.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (start, c) = chars[i];
        if c.is_alphanumeric() {
            let mut j = i + 1;
            while j < chars.len() {
                let (_, cj) = chars[j];
                if cj.is_alphanumeric() {
                    j += 1;
                } else if is_apostrophe(cj)
                    && chars.get(j + 1).is_some_and(|&(_, n)| n.is_alphanumeric())
                {
                    j += 2;
                } else {
                    break;
                }
            }
            let end = chars.get(j).map_or(chunk.len(), |&(e, _)| e);
            out.push(Token {
                text: chunk[start..end].to_lowercase(),
                kind: TokenKind::Word,
                span: offset + start..offset + end,
            });
            i = j;
        } else {
            out.push(punct(c, offset + start));
            i += 1;
        }
    }
}

/// Tokens joined with single spaces.
pub fn join(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(|t| t.text.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    /// Source text of the sentence, from its first to its last token.
    pub text: String,
    pub tokens: Vec<Token>,
}

fn is_terminator(token: &Token) -> bool {
    token.kind == TokenKind::Punct && matches!(token.text.as_str(), "." | "!" | "?")
}

/// Split on `.`, `!`, `?` (a run of terminators stays with its sentence) and
/// on line breaks. Text without terminators is a single sentence; text
/// without tokens has no sentences.
pub fn split_sentences(text: &str) -> Vec<Sentence> {
    let tokens = tokenize(text);
    let mut sentences = Vec::new();
    let mut begin = 0;
    for i in 0..tokens.len() {
        let next = tokens.get(i + 1);
        let ends = match next {
            None => true,
            Some(next) => {
                let terminator_run_ends = is_terminator(&tokens[i]) && !is_terminator(next);
                let line_break = text[tokens[i].span.end..next.span.start].contains('\n');
                terminator_run_ends || line_break
            }
        };
        if ends {
            let span = tokens[begin].span.start..tokens[i].span.end;
            sentences.push(Sentence {
                text: text[span].to_string(),
                tokens: tokens[begin..=i].to_vec(),
            });
            begin = i + 1;
        }
    }
    sentences
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("n-gram order must be at least 1")]
pub struct ZeroOrderError;

/// Contiguous n-grams in order; empty when there are fewer than `n` tokens.
pub fn ngrams<T>(tokens: &[T], n: usize) -> Result<std::slice::Windows<'_, T>, ZeroOrderError> {
    if n == 0 {
        return Err(ZeroOrderError);
    }
    Ok(tokens.windows(n))
}
