//! Peeking-based popularity prediction for information cascades.
//!
//! The pipeline observes the first `k` adopters of each item and predicts
//! whether the item ends above the cohort's median popularity:
//!
//! * [`corpus`] loads adoption logs and follow graphs (TSV or the `CLB1` binary cache).
//! * [`windows`] builds fixed-k and temporally matched (k-t) cohorts with median-split labels.
//! * [`features`] extracts temporal, structural, early-adopter and similarity features.
//! * [`learner`] trains logistic regression and runs cross-validation, ablations,
//!   single-feature scans and cross-dataset transfer.
//! * [`synth`] generates seeded follow graphs and cascades with cumulative advantage.
//! * [`experiment`] strings the stages together and writes reproducible reports.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod corpus;
pub mod error;
pub mod experiment;
pub mod features;
pub mod learner;
pub mod synth;
pub mod windows;

pub use error::{Error, Result};
