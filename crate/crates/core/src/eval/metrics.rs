use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::EvalError;
use crate::TriageLabel;

/// Counts indexed by `(true label, predicted label)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 4]; 4],
}

impl ConfusionMatrix {
    pub fn from_labels(
        truth: &[TriageLabel],
        predicted: &[TriageLabel],
    ) -> Result<Self, EvalError> {
        if truth.len() != predicted.len() {
            return Err(EvalError::LengthMismatch {
                truth: truth.len(),
                predicted: predicted.len(),
            });
        }
        let mut cm = ConfusionMatrix::default();
        for (t, p) in truth.iter().zip(predicted) {
            cm.add(*t, *p);
        }
        Ok(cm)
    }

    pub fn add(&mut self, truth: TriageLabel, predicted: TriageLabel) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    pub fn get(&self, truth: TriageLabel, predicted: TriageLabel) -> u64 {
        self.counts[truth.index()][predicted.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..4).map(|i| self.counts[i][i]).sum()
    }

    /// Two-class counts `(tp, fp, fn)` for the class selected by `positive`.
    pub fn binary_counts(&self, positive: impl Fn(TriageLabel) -> bool) -> (u64, u64, u64) {
        let (mut tp, mut fp, mut fn_) = (0, 0, 0);
        for t in TriageLabel::ALL {
            for p in TriageLabel::ALL {
                let n = self.get(t, p);
                match (positive(t), positive(p)) {
                    (true, true) => tp += n,
                    (false, true) => fp += n,
                    (true, false) => fn_ += n,
                    (false, false) => {}
                }
            }
        }
        (tp, fp, fn_)
    }

    /// F1 of the class selected by `positive` after collapsing labels.
    pub fn collapsed_f1(&self, positive: impl Fn(TriageLabel) -> bool) -> f64 {
        let (tp, fp, fn_) = self.binary_counts(positive);
        Prf::from_counts(tp, fp, fn_).f1
    }
}

/// Precision, recall and F1 of one class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Prf {
    /// Any 0/0 is taken as 0.
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            precision,
            recall,
            f1,
        }
    }
}

/// Per-class scores, indexed by [`TriageLabel::index`].
pub fn per_class_prf(cm: &ConfusionMatrix) -> [Prf; 4] {
    TriageLabel::ALL.map(|label| {
        let (tp, fp, fn_) = cm.binary_counts(|l| l == label);
        Prf::from_counts(tp, fp, fn_)
    })
}

/// Mean F1 over crisis, red and amber.
pub fn macro_f1_non_green(cm: &ConfusionMatrix) -> f64 {
    let prf = per_class_prf(cm);
    [TriageLabel::Crisis, TriageLabel::Red, TriageLabel::Amber]
        .iter()
        .map(|l| prf[l.index()].f1)
        .sum::<f64>()
        / 3.0
}

/// F1 of the flagged class when amber, red and crisis are merged.
///
/// Only the positive class counts here, unlike [`urgent_f1`], which averages
/// both sides of its split.
pub fn flagged_f1(cm: &ConfusionMatrix) -> f64 {
    cm.collapsed_f1(TriageLabel::is_flagged)
}

/// Mean of the urgent (red, crisis) and non-urgent (green, amber) F1 scores.
pub fn urgent_f1(cm: &ConfusionMatrix) -> f64 {
    let urgent = cm.collapsed_f1(TriageLabel::is_urgent);
    let calm = cm.collapsed_f1(|l| !l.is_urgent());
    (urgent + calm) / 2.0
}

/// F1 of crisis against everything else.
pub fn crisis_f1(cm: &ConfusionMatrix) -> f64 {
    cm.collapsed_f1(|l| l == TriageLabel::Crisis)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Indexed by [`TriageLabel::index`].
    pub per_class: [Prf; 4],
    pub macro_f1_non_green: f64,
    pub flagged_f1: f64,
    pub urgent_f1: f64,
    pub crisis_f1: f64,
    pub accuracy: f64,
    pub macro_f1_all: f64,
    pub confusion: ConfusionMatrix,
    /// True-label counts, indexed by [`TriageLabel::index`].
    pub support: [u64; 4],
}

impl EvalReport {
    pub fn from_confusion(cm: ConfusionMatrix) -> Self {
        let per_class = per_class_prf(&cm);
        let support =
            TriageLabel::ALL.map(|t| TriageLabel::ALL.iter().map(|&p| cm.get(t, p)).sum());
        EvalReport {
            per_class,
            macro_f1_non_green: macro_f1_non_green(&cm),
            flagged_f1: flagged_f1(&cm),
            urgent_f1: urgent_f1(&cm),
            crisis_f1: crisis_f1(&cm),
            accuracy: ratio(cm.correct(), cm.total()),
            macro_f1_all: per_class.iter().map(|p| p.f1).sum::<f64>() / 4.0,
            confusion: cm,
            support,
        }
    }

    pub fn metric(&self, metric: Metric) -> f64 {
        match metric {
            Metric::MacroF1NonGreen => self.macro_f1_non_green,
            Metric::FlaggedF1 => self.flagged_f1,
            Metric::UrgentF1 => self.urgent_f1,
            Metric::CrisisF1 => self.crisis_f1,
            Metric::Accuracy => self.accuracy,
            Metric::MacroF1All => self.macro_f1_all,
        }
    }

    pub fn class(&self, label: TriageLabel) -> Prf {
        self.per_class[label.index()]
    }
}

/// The four official metrics plus accuracy and the four-class macro F1.
pub fn official_metrics(
    truth: &[TriageLabel],
    predicted: &[TriageLabel],
) -> Result<EvalReport, EvalError> {
    if truth.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(EvalReport::from_confusion(ConfusionMatrix::from_labels(
        truth, predicted,
    )?))
}

/// Named scalar metrics, used for model selection and report columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    MacroF1NonGreen,
    FlaggedF1,
    UrgentF1,
    CrisisF1,
    Accuracy,
    MacroF1All,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::MacroF1NonGreen,
        Metric::FlaggedF1,
        Metric::UrgentF1,
        Metric::CrisisF1,
        Metric::Accuracy,
        Metric::MacroF1All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::MacroF1NonGreen => "macro_f1_non_green",
            Metric::FlaggedF1 => "flagged_f1",
            Metric::UrgentF1 => "urgent_f1",
            Metric::CrisisF1 => "crisis_f1",
            Metric::Accuracy => "accuracy",
            Metric::MacroF1All => "macro_f1_all",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.replace('-', "_");
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| format!("unknown metric {s:?}"))
    }
}
