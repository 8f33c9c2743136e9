//! Cross-validate logistic regression on a synthetic cohort, then fit a
//! final model and save it as JSON.
//!
//! ```text
//! cargo run --release --example train_cv
//! ```

use peekpop::corpus::Corpus;
use peekpop::features::featurize_cohort;
use peekpop::learner::{cross_validate, Hyperparams, LogisticModel};
use peekpop::synth::{generate, SynthConfig};
use peekpop::windows::{build_cohort, CohortSpec};

fn main() -> peekpop::Result<()> {
    let cfg = SynthConfig {
        n_items: 5000,
        ..SynthConfig::default()
    };
    let (graph, log) = generate(&cfg)?;
    let corpus = Corpus::new(log, graph, None);
    let cohort = build_cohort(&corpus.log, CohortSpec::fixed_k(5, 28))?;
    let matrix = featurize_cohort(&cohort, &corpus)?;

    let hp = Hyperparams::default();
    let report = cross_validate(&matrix, 5, 42, &hp)?;
    println!("5-fold accuracy {:.4} over {} items", report.accuracy, report.confusion.total());
    println!("per fold: {:?}", report.fold_accuracies.iter().map(|a| format!("{a:.3}")).collect::<Vec<_>>());
    println!("confusion: {:?}", report.confusion);

    let model = LogisticModel::fit_all(&matrix, &hp)?;
    let mut weights: Vec<(&str, f64)> = model.features.iter().map(String::as_str).zip(model.weights.iter().copied()).collect();
    weights.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
    println!("largest standardized coefficients:");
    for (name, w) in weights.iter().take(5) {
        println!("  {name:<16} {w:+.3}");
    }

    let path = std::env::temp_dir().join("peekpop-model.json");
    std::fs::write(&path, model.to_json()?).unwrap();
    let reloaded = LogisticModel::from_json(&std::fs::read_to_string(&path).unwrap())?;
    assert_eq!(reloaded.predict(&matrix, 0), model.predict(&matrix, 0));
    println!("saved model to {}", path.display());
    Ok(())
}
