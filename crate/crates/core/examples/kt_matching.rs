//! Fixing the time window removes most of the temporal signal: compare
//! fixed-k and k-t accuracy on the same synthetic data.
//!
//! ```text
//! cargo run --release --example kt_matching
//! ```

use peekpop::corpus::Corpus;
use peekpop::features::{featurize_cohort, FeatureMatrix};
use peekpop::learner::{cross_validate, Hyperparams};
use peekpop::synth::{generate, SynthConfig};
use peekpop::windows::{build_cohort, CohortSpec};

fn accuracies(matrix: &FeatureMatrix, hp: &Hyperparams) -> peekpop::Result<(f64, f64, f64)> {
    let schema = matrix.schema();
    let temporal = matrix.select_columns(&schema.columns_where(|c| c.is_temporal()));
    let other = matrix.select_columns(&schema.columns_where(|c| !c.is_temporal()));
    Ok((
        cross_validate(matrix, 5, 42, hp)?.accuracy,
        cross_validate(&temporal, 5, 42, hp)?.accuracy,
        cross_validate(&other, 5, 42, hp)?.accuracy,
    ))
}

fn main() -> peekpop::Result<()> {
    let cfg = SynthConfig {
        n_items: 20_000,
        ..SynthConfig::default()
    };
    let (graph, log) = generate(&cfg)?;
    let corpus = Corpus::new(log, graph, None);
    let hp = Hyperparams::default();

    let fixed = build_cohort(&corpus.log, CohortSpec::fixed_k(5, 28))?;
    let t = fixed.median_time_to_k().ceil() as u32;
    let matched = build_cohort(&corpus.log, CohortSpec::kt(5, 28, t))?;

    println!("{:<8} {:>6} {:>8} {:>9} {:>13}", "cohort", "items", "all", "temporal", "non-temporal");
    for (name, cohort) in [("fixed-k", &fixed), ("k-t", &matched)] {
        let matrix = featurize_cohort(cohort, &corpus)?;
        let (all, temporal, other) = accuracies(&matrix, &hp)?;
        println!("{name:<8} {:>6} {all:>8.4} {temporal:>9.4} {other:>13.4}", cohort.len());
    }
    println!("k-t window t = {t} days; its temporal columns include adoptions_1..adoptions_{t}");
    Ok(())
}
