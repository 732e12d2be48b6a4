//! Outcome classification: PCA followed by a random forest.

pub mod evaluate;
pub mod forest;
pub mod pca;
pub mod roc;

pub use evaluate::{evaluate, ClassificationReport, Dataset, EvalConfig, RepeatResult};
pub use forest::{forest_fit, ForestModel, ForestParams};
pub use pca::{pca_fit, PcaConfig, PcaModel, Retain};
pub use roc::{auc, auc_roc, roc_curve, write_roc_csv, RocPoint};
