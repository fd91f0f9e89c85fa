use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{official_metrics, EvalReport, Metric};
use crate::classify::GridCell;
use crate::corpus::require_labels;
use crate::error::Result;
use crate::features::{FeatureConfig, FeaturePreset, FeatureResources};
use crate::model::{TrainingSpec, TriageSystem};
use crate::LabeledPost;

/// One feature configuration to compare.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub name: String,
    pub title: String,
    pub features: FeatureConfig,
}

impl AblationRow {
    pub fn preset(p: FeaturePreset) -> Self {
        AblationRow {
            name: p.name().to_string(),
            title: p.title().to_string(),
            features: p.config(),
        }
    }

    pub fn custom(name: impl Into<String>, features: FeatureConfig) -> Self {
        let name = name.into();
        AblationRow {
            title: name.clone(),
            name,
            features,
        }
    }

    /// The five standard rows.
    pub fn standard() -> Vec<AblationRow> {
        FeaturePreset::STANDARD
            .into_iter()
            .map(Self::preset)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationResult {
    pub row: AblationRow,
    pub report: EvalReport,
    /// Hyperparameters of the evaluated model.
    pub cell: GridCell,
    pub cv_score: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AblationTable {
    pub results: Vec<AblationResult>,
}

/// Report columns, in order.
const COLUMNS: [(Metric, &str); 5] = [
    (Metric::MacroF1NonGreen, "macro"),
    (Metric::FlaggedF1, "flagged"),
    (Metric::UrgentF1, "urgent"),
    (Metric::CrisisF1, "crisis"),
    (Metric::Accuracy, "accuracy"),
];

impl AblationTable {
    pub fn get(&self, name: &str) -> Option<&AblationResult> {
        self.results.iter().find(|r| r.row.name == name)
    }

    /// Aligned plain-text table, one line per row.
    pub fn to_text(&self) -> String {
        let width = self
            .results
            .iter()
            .map(|r| r.row.title.chars().count())
            .chain(["Feature set".len()])
            .max()
            .unwrap_or(0);
        let mut out = format!("{:<width$}", "Feature set");
        for (_, head) in COLUMNS {
            write!(out, "  {head:>8}").unwrap();
        }
        out.push('\n');
        for r in &self.results {
            write!(out, "{:<width$}", r.row.title).unwrap();
            for (metric, _) in COLUMNS {
                write!(out, "  {:>8.4}", r.report.metric(metric)).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// One JSON object per row: name, the six metrics and the confusion
    /// matrix.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let metrics: serde_json::Map<String, serde_json::Value> = Metric::ALL
                .iter()
                .map(|m| (m.name().to_string(), r.report.metric(*m).into()))
                .collect();
            let record = serde_json::json!({
                "name": r.row.name,
                "title": r.row.title,
                "metrics": metrics,
                "confusion": r.report.confusion.counts,
                "model": r.cell,
                "cv_score": r.cv_score,
            });
            out.push_str(&record.to_string());
            out.push('\n');
        }
        out
    }
}

/// Fit each row's pipeline and classifier on `train` and evaluate on `test`.
pub fn ablation_run(
    train: &[LabeledPost],
    test: &[LabeledPost],
    rows: &[AblationRow],
    resources: &FeatureResources,
    spec: &TrainingSpec,
) -> Result<AblationTable> {
    if rows.is_empty() {
        return Ok(AblationTable::default());
    }
    let truth = require_labels(test)?;
    let results = rows
        .par_iter()
        .map(|row| {
            let system = TriageSystem::fit(train, &row.features, resources.clone(), spec)?;
            let predicted: Vec<_> = system
                .predict_all(test)?
                .into_iter()
                .map(|p| p.label)
                .collect();
            Ok(AblationResult {
                row: row.clone(),
                report: official_metrics(&truth, &predicted)?,
                cv_score: system.search.as_ref().map(|s| s.best_score),
                cell: system.cell,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AblationTable { results })
}
