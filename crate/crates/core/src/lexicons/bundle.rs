use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{hex, Lexicon, LexiconMeta};
use crate::error::{Error, LexiconError, Result};

/// One `[[lexicon]]` table of a bundle manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconEntryMeta {
    pub name: String,
    pub path: PathBuf,
    #[serde(default)]
    pub polarity_aware: bool,
    #[serde(default)]
    pub polarity_map: BTreeMap<String, String>,
    /// Emit per-category weight sums in addition to counts.
    #[serde(default)]
    pub weighted: bool,
}

impl LexiconEntryMeta {
    fn meta(&self) -> LexiconMeta {
        LexiconMeta {
            name: self.name.clone(),
            polarity_aware: self.polarity_aware,
            polarity_map: self.polarity_map.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconManifest {
    #[serde(rename = "lexicon")]
    pub lexicons: Vec<LexiconEntryMeta>,
}

impl LexiconManifest {
    pub fn parse(source: &str, path: &Path) -> Result<Self, LexiconError> {
        toml::from_str(source).map_err(|e| LexiconError::Manifest {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct LoadedLexicon {
    pub lexicon: Lexicon,
    pub weighted: bool,
}

/// The lexicons feeding the lexicon feature block, in manifest order.
#[derive(Debug, Clone)]
pub struct LexiconSet {
    lexicons: Vec<LoadedLexicon>,
}

const BUILTIN_MANIFEST: &str = include_str!("../../resources/lexicons/manifest.toml");

fn builtin_file(name: &Path) -> Option<&'static str> {
    Some(match name.to_str()? {
        "mpqa.tsv" => include_str!("../../resources/lexicons/mpqa.tsv"),
        "depechemood.tsv" => include_str!("../../resources/lexicons/depechemood.tsv"),
        "emolex.tsv" => include_str!("../../resources/lexicons/emolex.tsv"),
        "mental_disorder.tsv" => include_str!("../../resources/lexicons/mental_disorder.tsv"),
        "phq9.tsv" => include_str!("../../resources/lexicons/phq9.tsv"),
        "perma.tsv" => include_str!("../../resources/lexicons/perma.tsv"),
        "offensive.tsv" => include_str!("../../resources/lexicons/offensive.tsv"),
        _ => return None,
    })
}

impl LexiconSet {
    pub fn new(lexicons: Vec<LoadedLexicon>) -> Self {
        LexiconSet { lexicons }
    }

    /// The small stand-in lexicons shipped with the crate.
    pub fn builtin() -> Self {
        let manifest = LexiconManifest::parse(BUILTIN_MANIFEST, Path::new("<builtin>"))
            .expect("builtin manifest parses");
        let lexicons = manifest
            .lexicons
            .iter()
            .map(|entry| {
                let source = builtin_file(&entry.path).expect("builtin lexicon file exists");
                LoadedLexicon {
                    lexicon: Lexicon::parse(source, entry.meta()).expect("builtin lexicon parses"),
                    weighted: entry.weighted,
                }
            })
            .collect();
        LexiconSet { lexicons }
    }

    /// Load every lexicon listed in a TOML manifest. Relative paths resolve
    /// against the manifest's directory.
    pub fn from_manifest(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let source = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest = LexiconManifest::parse(&source, path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut lexicons = Vec::with_capacity(manifest.lexicons.len());
        for entry in &manifest.lexicons {
            let file = base.join(&entry.path);
            let text = fs::read_to_string(&file).map_err(|source| LexiconError::MissingFile {
                name: entry.name.clone(),
                path: file.clone(),
                source,
            })?;
            lexicons.push(LoadedLexicon {
                lexicon: Lexicon::parse(&text, entry.meta())?,
                weighted: entry.weighted,
            });
        }
        Ok(LexiconSet { lexicons })
    }

    pub fn iter(&self) -> impl Iterator<Item = &LoadedLexicon> {
        self.lexicons.iter()
    }

    pub fn get(&self, name: &str) -> Option<&Lexicon> {
        self.lexicons
            .iter()
            .map(|l| &l.lexicon)
            .find(|l| l.name() == name)
    }

    pub fn len(&self) -> usize {
        self.lexicons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lexicons.is_empty()
    }

    /// Digest over every lexicon's digest and weighted flag, in order.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for l in &self.lexicons {
            hasher.update(l.lexicon.digest().as_bytes());
            hasher.update([l.weighted as u8]);
        }
        hex(&hasher.finalize())
    }
}
