//! Build fixed-k and temporally matched cohorts from a small synthetic log.
//!
//! ```text
//! cargo run --release --example cohorts
//! ```

use peekpop::synth::{generate, SynthConfig};
use peekpop::windows::{build_cohort, CohortSpec};

fn main() -> peekpop::Result<()> {
    let cfg = SynthConfig {
        n_items: 4000,
        ..SynthConfig::profile("fast")?
    };
    let (_, log) = generate(&cfg)?;

    let fixed = build_cohort(&log, CohortSpec::fixed_k(5, 28))?;
    let t = fixed.median_time_to_k().ceil() as u32;
    println!(
        "fixed-k: {} items, median popularity {}, median time to 5th adopter {:.2} days",
        fixed.len(),
        fixed.median_popularity,
        fixed.median_time_to_k()
    );

    let matched = build_cohort(&log, CohortSpec::kt(5, 28, t))?;
    println!(
        "k-t (t = {t}): {} items, median popularity {}",
        matched.len(),
        matched.median_popularity
    );

    let w = &fixed.windows[0];
    println!(
        "first window: item {}, adopters {:?}, final popularity {}, label {}",
        log.items().name(w.item.0),
        w.adopters.iter().map(|u| log.users().name(u.0)).collect::<Vec<_>>(),
        w.final_popularity,
        w.label
    );
    let positives = fixed.labels().iter().filter(|&&l| l == 1).count();
    println!("{positives} of {} fixed-k items are above the median", fixed.len());
    Ok(())
}
