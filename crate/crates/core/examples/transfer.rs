//! Train on one synthetic domain, test on another: a fast network-driven
//! profile against a slow one.
//!
//! ```text
//! cargo run --release --example transfer
//! ```

use peekpop::corpus::Corpus;
use peekpop::experiment::{transfer_report, TransferReport};
use peekpop::features::{featurize_cohort, FeatureMatrix};
use peekpop::learner::Hyperparams;
use peekpop::synth::{generate, SynthConfig};
use peekpop::windows::{build_cohort, CohortSpec};

fn dataset(profile: &str) -> peekpop::Result<(String, FeatureMatrix)> {
    let cfg = SynthConfig {
        n_items: 6000,
        ..SynthConfig::profile(profile)?
    };
    let (graph, log) = generate(&cfg)?;
    let corpus = Corpus::new(log, graph, None);
    let cohort = build_cohort(&corpus.log, CohortSpec::fixed_k(5, 28))?;
    println!(
        "{profile}: {} items, median time to 5th adopter {:.2} days",
        cohort.len(),
        cohort.median_time_to_k()
    );
    Ok((profile.to_string(), featurize_cohort(&cohort, &corpus)?))
}

fn main() -> peekpop::Result<()> {
    let datasets = vec![dataset("fast")?, dataset("slow")?];
    let report = transfer_report(&datasets, 5, 42, &Hyperparams::default())?;

    println!("\ntemporal features (rows: test, columns: train)\n{}", report.temporal.to_csv());
    println!("largest drop from the diagonal: {:.3}", TransferReport::max_drop(&report.temporal));
    println!("\nnon-temporal features\n{}", report.non_temporal.to_csv());
    println!("largest drop from the diagonal: {:.3}", TransferReport::max_drop(&report.non_temporal));

    println!("\ncoefficient signs (fast, slow):");
    for row in &report.signs {
        let signs: Vec<&str> = row.signs.iter().map(|s| s.as_str()).collect();
        println!("  {:<18} {}{}", row.feature, signs.join(" "), if row.flips { "  flips" } else { "" });
    }
    Ok(())
}
