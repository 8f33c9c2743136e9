//! Run the whole pipeline from a TOML config and list the files it writes.
//!
//! ```text
//! cargo run --release --example experiment
//! ```

use peekpop::experiment::{run_experiment, ExperimentConfig};

const CONFIG: &str = r#"
seed = 42
out = "placeholder"

[dataset]
synth = "fast"

[cohort]
formulation = "kt"
k = 5
horizon_days = 28
"#;

fn main() -> peekpop::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut config = ExperimentConfig::from_toml(CONFIG)?;
    config.out = dir.path().to_path_buf();

    let summary = run_experiment(&config)?;
    println!(
        "{} cohort on `{}`: {} items, t = {:?} days, {} features",
        match summary.cohort.match_days {
            Some(_) => "k-t",
            None => "fixed-k",
        },
        summary.dataset,
        summary.cohort_size,
        summary.cohort.match_days,
        summary.schema_size
    );
    for (set, acc) in &summary.accuracies {
        println!("  {set:<13} {acc:.4}");
    }
    let mut files: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    files.sort();
    println!("wrote {}", files.join(", "));
    Ok(())
}
