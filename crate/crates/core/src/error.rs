use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-wide error. The variant names the module that raised it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("corpus: {0}")]
    Corpus(#[from] CorpusError),
    #[error("lexicons: {0}")]
    Lexicon(#[from] LexiconError),
    #[error("features: {0}")]
    Feature(#[from] FeatureError),
    #[error("classify: {0}")]
    Classify(#[from] ClassifyError),
    #[error("eval: {0}")]
    Eval(#[from] EvalError),
    #[error("model: {0}")]
    Model(#[from] ModelError),
    #[error("config: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the failure is caused by the caller's input or configuration
    /// rather than by a bug or an environment fault.
    pub fn is_user_error(&self) -> bool {
        match self {
            Error::Io { source, .. } => matches!(
                source.kind(),
                std::io::ErrorKind::NotFound | std::io::ErrorKind::PermissionDenied
            ),
            _ => true,
        }
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("duplicate post_id {post_id:?} on lines {first_line} and {second_line}")]
    DuplicateId {
        post_id: String,
        first_line: usize,
        second_line: usize,
    },
    #[error("unknown label {0:?} (expected green, amber, red or crisis)")]
    UnknownLabel(String),
    #[error("corpus is empty")]
    Empty,
    #[error("post {0:?} has no label")]
    Unlabeled(String),
    #[error("fold count {k} is invalid for {total} posts (need 2 <= k <= total)")]
    InvalidFoldCount { k: usize, total: usize },
    #[error("unsupported corpus format {0:?} (expected jsonl or csv)")]
    UnknownFormat(String),
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("{lexicon}: line {line}: {message}")]
    Malformed {
        lexicon: String,
        line: usize,
        message: String,
    },
    #[error("{lexicon}: term {term:?} has {tokens} tokens (at most 3 allowed)")]
    TermTooLong {
        lexicon: String,
        term: String,
        tokens: usize,
    },
    #[error(
        "{lexicon}: polarity map is not an involution: {from:?} -> {to:?} but {to:?} -> {back:?}"
    )]
    NotInvolution {
        lexicon: String,
        from: String,
        to: String,
        back: Option<String>,
    },
    #[error("manifest entry {name:?}: cannot read {path}: {source}")]
    MissingFile {
        name: String,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },
}

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("cannot fit TF-IDF on an empty corpus")]
    EmptyCorpus,
    #[error("max_features must be at least 1")]
    InvalidMaxFeatures,
    #[error("embedding table line {line}: {message}")]
    Embedding { line: usize, message: String },
    #[error("unknown pattern set {0:?} (expected helplines, self_harm or advisors)")]
    UnknownPatternSet(String),
    #[error("block {block} is enabled but {missing} is not available")]
    MissingState {
        block: &'static str,
        missing: &'static str,
    },
    #[error("unknown feature preset {0:?}")]
    UnknownPreset(String),
    #[error("lexicon {0:?} required by the sentiment scorer is not loaded")]
    MissingLexicon(String),
    #[error("saved feature layout has {saved} columns but the supplied resources give {current}")]
    LayoutMismatch { saved: usize, current: usize },
}

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("{features} feature vectors but {labels} labels")]
    LengthMismatch { features: usize, labels: usize },
    #[error("no training examples")]
    Empty,
    #[error("feature vector {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("training data contains a single class ({0})")]
    SingleClass(String),
    #[error("feature vector {index} has a non-finite value")]
    NonFinite { index: usize },
    #[error("feature pipeline fingerprint {found} does not match the model ({expected})")]
    FingerprintMismatch { expected: String, found: String },
    #[error("invalid hyperparameter: {0}")]
    InvalidParameter(String),
    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<ClassifyError>,
    },
    #[error("empty parameter grid")]
    EmptyGrid,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{truth} true labels but {predicted} predictions")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("nothing to evaluate")]
    Empty,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unsupported model file version {found} (this build reads version {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },
    #[error("not a triage model file (format tag {0:?})")]
    WrongFormat(String),
    #[error("cannot parse model file: {0}")]
    Parse(#[from] serde_json::Error),
}
