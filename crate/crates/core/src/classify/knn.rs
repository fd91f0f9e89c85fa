use std::cmp::{Ordering, Reverse};

use serde::{Deserialize, Serialize};

use super::{argmax_severity, check_query, validate_training, Classifier, Prediction};
use crate::error::ClassifyError;
use crate::features::FeatureVector;
use crate::TriageLabel;

/// Euclidean k-nearest-neighbour majority vote.
///
/// Neighbours at equal distance are taken in order of decreasing severity,
/// then training order; tied votes go to the more severe label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub dim: usize,
    /// Non-zero entries of each training vector.
    pub rows: Vec<Vec<(usize, f64)>>,
    pub labels: Vec<TriageLabel>,
    pub fingerprint: String,
}

impl KnnModel {
    /// Squared distances from `x` to every training vector.
    pub fn squared_distances(&self, x: &FeatureVector) -> Vec<f64> {
        let q = x.to_dense();
        let q_norm: f64 = q.iter().map(|v| v * v).sum();
        self.rows
            .iter()
            .map(|row| {
                let d = row
                    .iter()
                    .map(|&(c, v)| (q[c] - v) * (q[c] - v) - q[c] * q[c])
                    .sum::<f64>()
                    + q_norm;
                d.max(0.0)
            })
            .collect()
    }

    /// Indices of the `k` nearest training vectors, nearest first.
    pub fn neighbors(&self, x: &FeatureVector) -> Vec<usize> {
        let dist = self.squared_distances(x);
        let mut order: Vec<usize> = (0..dist.len()).collect();
        let key = |&i: &usize| (Reverse(self.labels[i]), i);
        order.sort_by(|a, b| {
            dist[*a]
                .partial_cmp(&dist[*b])
                .unwrap_or(Ordering::Equal)
                .then_with(|| key(a).cmp(&key(b)))
        });
        order.truncate(self.k);
        order
    }
}

impl Classifier for KnnModel {
    /// Scores are neighbour vote counts.
    fn predict(&self, x: &FeatureVector) -> Result<Prediction, ClassifyError> {
        check_query(x, self.dim, &self.fingerprint)?;
        let mut votes = [0.0; 4];
        for i in self.neighbors(x) {
            votes[self.labels[i].index()] += 1.0;
        }
        Ok(Prediction {
            label: argmax_severity(&votes),
            scores: votes,
        })
    }
}

pub fn train_knn(
    xs: &[FeatureVector],
    ys: &[TriageLabel],
    k: usize,
) -> Result<KnnModel, ClassifyError> {
    let dim = validate_training(xs, ys)?;
    if k == 0 || k > xs.len() {
        return Err(ClassifyError::InvalidParameter(format!(
            "k must be between 1 and {} (the training size), got {k}",
            xs.len()
        )));
    }
    Ok(KnnModel {
        k,
        dim,
        rows: xs
            .iter()
            .map(|x| x.entries().filter(|&(_, v)| v != 0.0).collect())
            .collect(),
        labels: ys.to_vec(),
        fingerprint: xs[0].fingerprint.to_string(),
    })
}
