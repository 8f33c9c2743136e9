//! Logistic-regression training and evaluation harnesses.

mod eval;
mod logistic;
mod standardize;

pub use self::eval::{
    ablation, cross_validate, evaluate, fold_assignment, sign_table, single_feature_scan, transfer_matrix,
    AblationEntry, Confusion, EvalReport, FeatureScan, Sign, SignRow, TransferMatrix, ALL, ALL_MINUS_TEMPORAL,
};
pub use self::logistic::{objective, sigmoid, train_logistic, Hyperparams, LogisticFit, LogisticModel};
pub use self::standardize::{apply_standardizer, fit_standardizer, Design, StandardizationParams};

/// Folds used throughout.
pub const DEFAULT_FOLDS: usize = 5;
