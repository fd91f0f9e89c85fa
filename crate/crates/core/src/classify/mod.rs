//! One-vs-rest linear SVM, multinomial Naive Bayes and KNN classifiers, plus
//! cross-validated grid search.

mod matrix;

pub mod grid;
pub mod knn;
pub mod nb;
pub mod svm;

use serde::{Deserialize, Serialize};

pub use grid::{grid_search, CellScore, GridCell, GridResult, ParamGrid};
pub use knn::{train_knn, KnnModel};
pub use nb::{train_nb, NaiveBayesModel, DEFAULT_ALPHA};
pub use svm::{
    example_weights, train_svm, BinaryProblem, CScaling, ClassWeight, LinearSvmModel, Loss,
    Optimizer, Penalty, TrainConfig,
};

use crate::error::ClassifyError;
use crate::features::FeatureVector;
use crate::TriageLabel;

/// Predicted label with one score per label, indexed by
/// [`TriageLabel::index`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: TriageLabel,
    pub scores: [f64; 4],
}

impl Prediction {
    pub fn from_scores(scores: [f64; 4]) -> Self {
        Prediction {
            label: argmax_severity(&scores),
            scores,
        }
    }

    pub fn score(&self, label: TriageLabel) -> f64 {
        self.scores[label.index()]
    }
}

/// Index of the largest score; ties go to the more severe label.
pub fn argmax_severity(scores: &[f64; 4]) -> TriageLabel {
    let mut best = TriageLabel::Green;
    for label in TriageLabel::ALL {
        if scores[label.index()] >= scores[best.index()] {
            best = label;
        }
    }
    best
}

/// A fitted model that labels feature vectors.
pub trait Classifier: Send + Sync {
    fn predict(&self, x: &FeatureVector) -> Result<Prediction, ClassifyError>;

    fn predict_all(&self, xs: &[FeatureVector]) -> Result<Vec<Prediction>, ClassifyError> {
        xs.iter().map(|x| self.predict(x)).collect()
    }
}

/// Any of the fitted classifiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "estimator", rename_all = "kebab-case")]
pub enum TrainedModel {
    Svm(LinearSvmModel),
    NaiveBayes(NaiveBayesModel),
    Knn(KnnModel),
}

impl TrainedModel {
    pub fn fingerprint(&self) -> &str {
        match self {
            TrainedModel::Svm(m) => &m.fingerprint,
            TrainedModel::NaiveBayes(m) => &m.fingerprint,
            TrainedModel::Knn(m) => &m.fingerprint,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TrainedModel::Svm(_) => "svm",
            TrainedModel::NaiveBayes(_) => "naive-bayes",
            TrainedModel::Knn(_) => "knn",
        }
    }
}

impl Classifier for TrainedModel {
    fn predict(&self, x: &FeatureVector) -> Result<Prediction, ClassifyError> {
        match self {
            TrainedModel::Svm(m) => m.predict(x),
            TrainedModel::NaiveBayes(m) => m.predict(x),
            TrainedModel::Knn(m) => m.predict(x),
        }
    }
}

/// Check shapes and values of a training set; returns the feature dimension.
pub(crate) fn validate_training(
    xs: &[FeatureVector],
    ys: &[TriageLabel],
) -> Result<usize, ClassifyError> {
    if xs.len() != ys.len() {
        return Err(ClassifyError::LengthMismatch {
            features: xs.len(),
            labels: ys.len(),
        });
    }
    let first = xs.first().ok_or(ClassifyError::Empty)?;
    let dim = first.dim();
    for (index, x) in xs.iter().enumerate() {
        if x.dim() != dim {
            return Err(ClassifyError::DimensionMismatch {
                index,
                expected: dim,
                found: x.dim(),
            });
        }
        if x.fingerprint != first.fingerprint {
            return Err(ClassifyError::FingerprintMismatch {
                expected: first.fingerprint.to_string(),
                found: x.fingerprint.to_string(),
            });
        }
        if !x.is_finite() {
            return Err(ClassifyError::NonFinite { index });
        }
    }
    Ok(dim)
}

pub(crate) fn require_two_classes(ys: &[TriageLabel]) -> Result<(), ClassifyError> {
    match ys.first() {
        Some(&first) if ys.iter().all(|&y| y == first) => {
            Err(ClassifyError::SingleClass(first.to_string()))
        }
        _ => Ok(()),
    }
}

/// Check a query vector against a model's dimension and fingerprint.
pub(crate) fn check_query(
    x: &FeatureVector,
    dim: usize,
    fingerprint: &str,
) -> Result<(), ClassifyError> {
    if *x.fingerprint != *fingerprint {
        return Err(ClassifyError::FingerprintMismatch {
            expected: fingerprint.to_string(),
            found: x.fingerprint.to_string(),
        });
    }
    if x.dim() != dim {
        return Err(ClassifyError::DimensionMismatch {
            index: 0,
            expected: dim,
            found: x.dim(),
        });
    }
    Ok(())
}
