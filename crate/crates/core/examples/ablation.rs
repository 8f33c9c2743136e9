//! Accuracy of each feature category alone, all features, and all
//! non-temporal features.
//!
//! ```text
//! cargo run --release --example ablation
//! ```

use peekpop::corpus::Corpus;
use peekpop::features::featurize_cohort;
use peekpop::learner::{ablation, Hyperparams};
use peekpop::synth::{generate, SynthConfig};
use peekpop::windows::{build_cohort, CohortSpec};

fn main() -> peekpop::Result<()> {
    let cfg = SynthConfig {
        n_items: 8000,
        ..SynthConfig::default()
    };
    let (graph, log) = generate(&cfg)?;
    let corpus = Corpus::new(log, graph, None);
    let cohort = build_cohort(&corpus.log, CohortSpec::fixed_k(5, 28))?;
    let matrix = featurize_cohort(&cohort, &corpus)?;
    println!("{} items in the cohort", matrix.rows());

    let categories = matrix.schema().categories();
    for entry in ablation(&matrix, &categories, 5, 42, &Hyperparams::default())? {
        println!(
            "{:<13} {:>2} columns  accuracy {:.4}",
            entry.feature_set,
            entry.report.features.len(),
            entry.report.accuracy
        );
    }
    Ok(())
}
