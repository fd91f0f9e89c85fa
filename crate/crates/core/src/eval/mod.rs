//! Confusion matrices, per-class scores, the official triage metrics and the
//! feature-set ablation report.

pub mod ablation;
pub mod metrics;

pub use ablation::{ablation_run, AblationRow, AblationTable};
pub use metrics::{
    crisis_f1, flagged_f1, macro_f1_non_green, official_metrics, per_class_prf, urgent_f1,
    ConfusionMatrix, EvalReport, Metric, Prf,
};
