use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    train_knn, train_nb, train_svm, ClassWeight, Classifier, Penalty, TrainConfig, TrainedModel,
};
use crate::corpus::stratified_fold_indices;
use crate::error::{ClassifyError, Result};
use crate::eval::{official_metrics, Metric};
use crate::features::FeatureVector;
use crate::TriageLabel;

/// Candidate values per hyperparameter. Lists are searched exhaustively.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamGrid {
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    pub penalty: Vec<Penalty>,
    pub class_weight: Vec<ClassWeight>,
    /// Neighbour counts for KNN.
    pub k: Vec<usize>,
    /// Smoothing values for Naive Bayes.
    pub alpha: Vec<f64>,
}

impl Default for ParamGrid {
    fn default() -> Self {
        ParamGrid {
            c: vec![0.01, 0.1, 1.0, 10.0, 100.0],
            penalty: vec![Penalty::L1],
            class_weight: vec![ClassWeight::Uniform],
            k: (1..=25).collect(),
            alpha: vec![super::DEFAULT_ALPHA],
        }
    }
}

impl ParamGrid {
    /// SVM cells in tie-break order: smaller C first.
    pub fn svm_cells(&self, base: &TrainConfig) -> Vec<GridCell> {
        let mut c = self.c.clone();
        c.sort_by(f64::total_cmp);
        let mut cells = Vec::new();
        for &c in &c {
            for &penalty in &self.penalty {
                for &class_weight in &self.class_weight {
                    cells.push(GridCell::Svm(TrainConfig {
                        c,
                        penalty,
                        class_weight,
                        ..base.clone()
                    }));
                }
            }
        }
        cells
    }

    /// KNN cells, smaller k first.
    pub fn knn_cells(&self) -> Vec<GridCell> {
        let mut k = self.k.clone();
        k.sort_unstable();
        k.dedup();
        k.into_iter().map(|k| GridCell::Knn { k }).collect()
    }

    pub fn nb_cells(&self) -> Vec<GridCell> {
        let mut a = self.alpha.clone();
        a.sort_by(f64::total_cmp);
        a.into_iter()
            .map(|alpha| GridCell::NaiveBayes { alpha })
            .collect()
    }
}

/// One hyperparameter setting of one estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "estimator", rename_all = "kebab-case")]
pub enum GridCell {
    Svm(TrainConfig),
    NaiveBayes { alpha: f64 },
    Knn { k: usize },
}

impl GridCell {
    pub fn fit(
        &self,
        xs: &[FeatureVector],
        ys: &[TriageLabel],
    ) -> Result<TrainedModel, ClassifyError> {
        Ok(match self {
            GridCell::Svm(cfg) => TrainedModel::Svm(train_svm(xs, ys, cfg)?),
            GridCell::NaiveBayes { alpha } => TrainedModel::NaiveBayes(train_nb(xs, ys, *alpha)?),
            GridCell::Knn { k } => TrainedModel::Knn(train_knn(xs, ys, *k)?),
        })
    }

    pub fn describe(&self) -> String {
        match self {
            GridCell::Svm(c) => format!(
                "svm C={} penalty={} class_weight={}",
                c.c, c.penalty, c.class_weight
            ),
            GridCell::NaiveBayes { alpha } => format!("naive-bayes alpha={alpha}"),
            GridCell::Knn { k } => format!("knn k={k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellScore {
    pub cell: GridCell,
    pub mean: f64,
    pub folds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub best: GridCell,
    pub best_score: f64,
    pub metric: Metric,
    pub cells: Vec<CellScore>,
}

/// Score every cell by stratified k-fold cross-validation and pick the
/// best mean. Ties keep the earlier cell, so cells should be listed from
/// simplest to most flexible.
pub fn grid_search(
    xs: &[FeatureVector],
    ys: &[TriageLabel],
    cells: &[GridCell],
    k_folds: usize,
    seed: u64,
    metric: Metric,
) -> Result<GridResult> {
    if cells.is_empty() {
        return Err(ClassifyError::EmptyGrid.into());
    }
    super::validate_training(xs, ys)?;
    let folds = stratified_fold_indices(ys, k_folds, seed)?;

    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..k_folds).map(move |f| (c, f)))
        .collect();
    let scores: Vec<f64> = jobs
        .par_iter()
        .map(|&(c, fold)| {
            let split = |held: bool| {
                let idx: Vec<usize> = (0..xs.len())
                    .filter(|&i| (folds[i] == fold) == held)
                    .collect();
                let x: Vec<FeatureVector> = idx.iter().map(|&i| xs[i].clone()).collect();
                let y: Vec<TriageLabel> = idx.iter().map(|&i| ys[i]).collect();
                (x, y)
            };
            let (train_x, train_y) = split(false);
            let (test_x, test_y) = split(true);
            let wrap = |e| ClassifyError::Fold {
                fold,
                source: Box::new(e),
            };
            let model = cells[c].fit(&train_x, &train_y).map_err(wrap)?;
            let predicted: Vec<TriageLabel> = model
                .predict_all(&test_x)
                .map_err(wrap)?
                .into_iter()
                .map(|p| p.label)
                .collect();
            Ok(official_metrics(&test_y, &predicted)?.metric(metric))
        })
        .collect::<Result<_>>()?;

    let mut result_cells = Vec::with_capacity(cells.len());
    let mut best = 0;
    for (c, cell) in cells.iter().enumerate() {
        let fold_scores = scores[c * k_folds..(c + 1) * k_folds].to_vec();
        let mean = fold_scores.iter().sum::<f64>() / k_folds as f64;
        result_cells.push(CellScore {
            cell: cell.clone(),
            mean,
            folds: fold_scores,
        });
        if mean > result_cells[best].mean {
            best = c;
        }
    }
    Ok(GridResult {
        best: cells[best].clone(),
        best_score: result_cells[best].mean,
        metric,
        cells: result_cells,
    })
}
