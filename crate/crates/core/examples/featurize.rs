//! Compute the full feature row for a few cascades and write the matrix as CSV.
//!
//! ```text
//! cargo run --release --example featurize
//! ```

use peekpop::corpus::Corpus;
use peekpop::features::{featurize_cohort, Category};
use peekpop::synth::{generate, SynthConfig};
use peekpop::windows::{build_cohort, CohortSpec};

fn main() -> peekpop::Result<()> {
    let cfg = SynthConfig {
        n_items: 3000,
        ..SynthConfig::profile("fast")?
    };
    let (graph, log) = generate(&cfg)?;
    let corpus = Corpus::new(log, graph, None);
    let cohort = build_cohort(&corpus.log, CohortSpec::fixed_k(5, 28))?;
    let matrix = featurize_cohort(&cohort, &corpus)?;
    println!("{} windows × {} features", matrix.rows(), matrix.cols());

    for category in matrix.schema().categories() {
        let names: Vec<&str> = matrix
            .schema()
            .features()
            .iter()
            .filter(|f| f.category == category)
            .map(|f| f.name.as_str())
            .collect();
        println!("{:<11} {}", category.as_str(), names.join(" "));
    }

    println!("\nrow 0 (label {}):", matrix.labels()[0]);
    for (c, f) in matrix.schema().features().iter().enumerate() {
        let shown = matrix.value(0, c).map_or_else(|| "missing".to_string(), |v| format!("{v:.3}"));
        println!("  {:<18} {shown}", f.name);
    }

    let temporal = matrix.select_categories(&[Category::Temporal]);
    let out = std::env::temp_dir().join("peekpop-temporal.csv");
    temporal.write_csv(&out)?;
    println!("\nwrote temporal columns to {}", out.display());
    Ok(())
}
