//! One single-feature model per column: how much does each feature predict alone?
//!
//! ```text
//! cargo run --release --example scan
//! ```

use peekpop::corpus::Corpus;
use peekpop::features::featurize_cohort;
use peekpop::learner::{cross_validate, single_feature_scan, Hyperparams};
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
    let hp = Hyperparams::default();

    let all = cross_validate(&matrix, 5, 42, &hp)?.accuracy;
    let mut scan = single_feature_scan(&matrix, 5, 42, &hp)?;
    scan.sort_by(|a, b| b.accuracy.total_cmp(&a.accuracy));
    println!("all features: {all:.4}");
    for s in &scan {
        println!(
            "{:<18} {:.4} ({:>5.1}% of all)  sign {}",
            s.feature,
            s.accuracy,
            100.0 * s.accuracy / all,
            s.sign.as_str()
        );
    }
    Ok(())
}
