//! Subject-independent cross-validation, metrics, fusion and reporting.

pub mod folds;
pub mod fusion;
pub mod metrics;
pub mod report;
pub mod run;

pub use folds::{grouped_stratified_kfold, FoldPlan};
pub use fusion::{fuse_decisions, fuse_decisions_detailed, fuse_features, ClassProbabilities, FUSED_DIM};
pub use metrics::{
    confusion, mean_roc_curve, mean_std, pr_auc, roc_auc, roc_curve, sensitivity_specificity, trapezoid_area,
    ConfusionCounts, FoldMetrics, RocPoint,
};
pub use report::{format_cell, parse_roc_csv, render_comparison, render_summary_table, roc_csv};
pub use run::{
    method_cohort, run_task, EvalConfig, EvalSummary, FoldAudit, FoldRun, MetricSummary, Method, Prediction, TaskRun,
};
