//! Training recipe, fitted system (pipeline + classifier) and the versioned
//! model file.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classify::{
    grid_search, Classifier, GridCell, GridResult, ParamGrid, Prediction, TrainConfig, TrainedModel,
};
use crate::corpus::require_labels;
use crate::error::{ClassifyError, Error, FeatureError, ModelError, Result};
use crate::eval::Metric;
use crate::features::{FeatureConfig, FeaturePipeline, FeatureResources, FittedParts};
use crate::LabeledPost;

pub const MODEL_FORMAT: &str = "triage-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    #[default]
    Svm,
    NaiveBayes,
    Knn,
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::Svm => "svm",
            Estimator::NaiveBayes => "naive-bayes",
            Estimator::Knn => "knn",
        })
    }
}

impl FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "svm" => Ok(Estimator::Svm),
            "naive-bayes" | "nb" => Ok(Estimator::NaiveBayes),
            "knn" => Ok(Estimator::Knn),
            _ => Err(format!(
                "unknown estimator {s:?} (expected svm, naive-bayes or knn)"
            )),
        }
    }
}

/// How to train a classifier on featurized posts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingSpec {
    pub estimator: Estimator,
    pub svm: TrainConfig,
    pub alpha: f64,
    pub k: usize,
    /// Cross-validated search over this grid when set; otherwise the fixed
    /// hyperparameters above are used.
    pub grid: Option<ParamGrid>,
    pub k_folds: usize,
    pub metric: Metric,
    pub seed: u64,
}

impl Default for TrainingSpec {
    fn default() -> Self {
        TrainingSpec {
            estimator: Estimator::Svm,
            svm: TrainConfig::default(),
            alpha: crate::classify::DEFAULT_ALPHA,
            k: 5,
            grid: None,
            k_folds: 5,
            metric: Metric::MacroF1NonGreen,
            seed: 0,
        }
    }
}

impl TrainingSpec {
    /// Fixed cell used when no grid is configured.
    pub fn fixed_cell(&self) -> GridCell {
        match self.estimator {
            Estimator::Svm => GridCell::Svm(TrainConfig {
                seed: self.seed,
                ..self.svm.clone()
            }),
            Estimator::NaiveBayes => GridCell::NaiveBayes { alpha: self.alpha },
            Estimator::Knn => GridCell::Knn { k: self.k },
        }
    }

    pub fn grid_cells(&self, grid: &ParamGrid) -> Vec<GridCell> {
        match self.estimator {
            Estimator::Svm => grid.svm_cells(&TrainConfig {
                seed: self.seed,
                ..self.svm.clone()
            }),
            Estimator::NaiveBayes => grid.nb_cells(),
            Estimator::Knn => grid.knn_cells(),
        }
    }
}

/// A fitted feature pipeline with the classifier trained on its output.
#[derive(Debug, Clone)]
pub struct TriageSystem {
    pub pipeline: FeaturePipeline,
    pub model: TrainedModel,
    /// The cell the model was trained with.
    pub cell: GridCell,
    pub search: Option<GridResult>,
}

impl TriageSystem {
    /// Fit the pipeline on `posts`, optionally grid-search, and train the
    /// final model on all of `posts`.
    pub fn fit(
        posts: &[LabeledPost],
        features: &FeatureConfig,
        resources: FeatureResources,
        spec: &TrainingSpec,
    ) -> Result<Self> {
        let labels = require_labels(posts)?;
        let pipeline = FeaturePipeline::fit(posts, features, resources)?;
        let xs = pipeline.transform(posts);
        let (cell, search) = match &spec.grid {
            Some(grid) => {
                let cells = spec.grid_cells(grid);
                let result =
                    grid_search(&xs, &labels, &cells, spec.k_folds, spec.seed, spec.metric)?;
                (result.best.clone(), Some(result))
            }
            None => (spec.fixed_cell(), None),
        };
        let model = cell.fit(&xs, &labels)?;
        Ok(TriageSystem {
            pipeline,
            model,
            cell,
            search,
        })
    }

    pub fn predict(&self, post: &LabeledPost) -> Result<Prediction> {
        Ok(self.model.predict(&self.pipeline.transform_one(post))?)
    }

    /// Predictions for many posts, in input order.
    pub fn predict_all(&self, posts: &[LabeledPost]) -> Result<Vec<Prediction>> {
        let xs = self.pipeline.transform(posts);
        Ok(self.model.predict_all(&xs)?)
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            fingerprint: self.pipeline.fingerprint().to_string(),
            features: self.pipeline.parts().clone(),
            cell: self.cell.clone(),
            model: self.model.clone(),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_file().save(path)
    }

    /// Load a model file and bind it to `resources`. Fails with a
    /// fingerprint mismatch when the resources differ from those used in
    /// training.
    pub fn load(path: impl AsRef<Path>, resources: FeatureResources) -> Result<Self> {
        ModelFile::load(path)?.into_system(resources)
    }
}

/// On-disk form of a [`TriageSystem`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub fingerprint: String,
    pub features: FittedParts,
    pub cell: GridCell,
    pub model: TrainedModel,
}

#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
}

impl ModelFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let header: Header = serde_json::from_str(text)?;
        if header.format != MODEL_FORMAT {
            return Err(ModelError::WrongFormat(header.format));
        }
        if header.version != MODEL_VERSION {
            return Err(ModelError::UnsupportedVersion {
                found: header.version,
                supported: MODEL_VERSION,
            });
        }
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::from_json(&text)?)
    }

    pub fn into_system(self, resources: FeatureResources) -> Result<TriageSystem> {
        let pipeline = match FeaturePipeline::from_parts(self.features, resources) {
            Ok(p) => p,
            Err(Error::Feature(FeatureError::LayoutMismatch { saved, current })) => {
                return Err(ClassifyError::FingerprintMismatch {
                    expected: self.fingerprint,
                    found: format!("a pipeline with {current} dense columns instead of {saved}"),
                }
                .into())
            }
            Err(e) => return Err(e),
        };
        if pipeline.fingerprint() != self.fingerprint
            || self.model.fingerprint() != self.fingerprint
        {
            return Err(ClassifyError::FingerprintMismatch {
                expected: self.fingerprint,
                found: pipeline.fingerprint().to_string(),
            }
            .into());
        }
        Ok(TriageSystem {
            pipeline,
            model: self.model,
            cell: self.cell,
            search: None,
        })
    }
}
