use serde::{Deserialize, Serialize};

use super::{check_query, require_two_classes, validate_training, Classifier, Prediction};
use crate::error::ClassifyError;
use crate::features::FeatureVector;
use crate::TriageLabel;

pub const DEFAULT_ALPHA: f64 = 1.0;

/// Multinomial Naive Bayes over shifted, non-negative features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    pub alpha: f64,
    /// Added to each feature before use so training values are >= 0.
    pub shift: Vec<f64>,
    /// `ln P(label)`, `None` for labels absent from training.
    pub log_prior: [Option<f64>; 4],
    /// `ln P(feature | label)` per label.
    pub log_likelihood: Vec<Vec<f64>>,
    pub fingerprint: String,
}

impl NaiveBayesModel {
    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    /// Joint log-probability of `x` under each label; absent labels get
    /// negative infinity.
    pub fn joint_log_likelihood(&self, x: &FeatureVector) -> [f64; 4] {
        let dense = x.to_dense();
        TriageLabel::ALL.map(|label| match self.log_prior[label.index()] {
            None => f64::NEG_INFINITY,
            Some(prior) => {
                let ll = &self.log_likelihood[label.index()];
                prior
                    + dense
                        .iter()
                        .zip(&self.shift)
                        .zip(ll)
                        .map(|((v, s), l)| (v + s).max(0.0) * l)
                        .sum::<f64>()
            }
        })
    }
}

impl Classifier for NaiveBayesModel {
    fn predict(&self, x: &FeatureVector) -> Result<Prediction, ClassifyError> {
        check_query(x, self.dim(), &self.fingerprint)?;
        Ok(Prediction::from_scores(self.joint_log_likelihood(x)))
    }
}

pub fn train_nb(
    xs: &[FeatureVector],
    ys: &[TriageLabel],
    alpha: f64,
) -> Result<NaiveBayesModel, ClassifyError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(ClassifyError::InvalidParameter(format!(
            "smoothing alpha must be positive, got {alpha}"
        )));
    }
    let dim = validate_training(xs, ys)?;
    require_two_classes(ys)?;
    let rows: Vec<Vec<f64>> = xs.iter().map(FeatureVector::to_dense).collect();

    let mut shift = vec![0.0f64; dim];
    for row in &rows {
        for (s, v) in shift.iter_mut().zip(row) {
            *s = s.max(-v);
        }
    }

    let mut totals = vec![vec![0.0; dim]; 4];
    let mut counts = [0usize; 4];
    for (row, y) in rows.iter().zip(ys) {
        counts[y.index()] += 1;
        for ((t, v), s) in totals[y.index()].iter_mut().zip(row).zip(&shift) {
            *t += v + s;
        }
    }
    let n = ys.len() as f64;
    let log_prior = TriageLabel::ALL.map(|l| {
        let c = counts[l.index()];
        (c > 0).then(|| (c as f64 / n).ln())
    });
    let log_likelihood = totals
        .iter()
        .map(|t| {
            let denom = t.iter().sum::<f64>() + alpha * dim as f64;
            t.iter().map(|v| ((v + alpha) / denom).ln()).collect()
        })
        .collect();
    Ok(NaiveBayesModel {
        alpha,
        shift,
        log_prior,
        log_likelihood,
        fingerprint: xs[0].fingerprint.to_string(),
    })
}
