use serde::{Deserialize, Serialize};

use crate::text::{Token, TokenKind};

pub const PRONOUNS: [&str; 12] = [
    "i", "me", "you", "he", "him", "she", "her", "it", "we", "us", "they", "them",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceStats {
    /// Counts aligned with [`PRONOUNS`].
    pub pronouns: [u32; 12],
    /// Mean character count of word tokens; 0 for a post without words.
    pub mean_word_length: f64,
    pub web_links: u32,
}

impl SurfaceStats {
    pub fn pronoun(&self, pronoun: &str) -> u32 {
        PRONOUNS
            .iter()
            .position(|p| *p == pronoun)
            .map_or(0, |i| self.pronouns[i])
    }
}

pub fn surface_stats_tokens(tokens: &[Token]) -> SurfaceStats {
    let mut pronouns = [0u32; 12];
    let mut web_links = 0;
    let mut chars = 0usize;
    let mut words = 0usize;
    for token in tokens {
        match token.kind {
            TokenKind::Url => web_links += 1,
            TokenKind::Punct => {}
            TokenKind::Word => {
                words += 1;
                chars += token.text.chars().count();
                if let Some(i) = PRONOUNS.iter().position(|p| *p == token.text) {
                    pronouns[i] += 1;
                }
            }
        }
    }
    SurfaceStats {
        pronouns,
        mean_word_length: if words == 0 {
            0.0
        } else {
            chars as f64 / words as f64
        },
        web_links,
    }
}

pub fn surface_stats(post: &crate::LabeledPost) -> SurfaceStats {
    surface_stats_tokens(&crate::text::tokenize(&post.body))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::LabeledPost;

    #[test]
    fn pronouns_and_word_length() {
        let s = surface_stats(&LabeledPost::unlabeled("p", "I like it"));
        assert_eq!(s.pronoun("i"), 1);
        assert_eq!(s.pronoun("it"), 1);
        assert_eq!(s.pronouns.iter().sum::<u32>(), 2);
        assert!((s.mean_word_length - 7.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.web_links, 0);
    }

    #[test]
    fn empty_post() {
        let s = surface_stats(&LabeledPost::unlabeled("p", ""));
        assert_eq!(s.pronouns, [0; 12]);
        assert_eq!(s.mean_word_length, 0.0);
        assert_eq!(s.web_links, 0);
    }

    #[test]
    fn links_counted_and_excluded_from_length() {
        let s = surface_stats(&LabeledPost::unlabeled(
            "p",
            "see www.reachout.com and www.moodgym.anu.edu.au",
        ));
        assert_eq!(s.web_links, 2);
        assert!((s.mean_word_length - 3.0).abs() < 1e-12);
    }
}
