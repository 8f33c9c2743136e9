//! Popularity skew of the default synthetic profile, and how it responds to
//! the cumulative-advantage strength.
//!
//! ```text
//! cargo run --release --example synth_skew
//! ```

use peekpop::synth::{generate, generate_graph, gini, simulate_adoptions, top_share, SynthConfig};

fn main() -> peekpop::Result<()> {
    let cfg = SynthConfig::default();
    let (graph, log) = generate(&cfg)?;
    let pop = log.item_popularity();
    println!(
        "default profile: {} users, {} edges, {} adoptions of {} items",
        graph.node_count(),
        graph.edge_count(),
        log.len(),
        pop.len()
    );
    println!("top 20% of items hold {:.3} of adoptions", top_share(&pop, 0.2));
    println!("gini {:.3}, most popular item {}", gini(&pop), pop.iter().max().unwrap());

    let small = SynthConfig {
        n_items: 5000,
        ..cfg
    };
    let graph = generate_graph(&small)?;
    for alpha in [0.0, 0.5, 1.0] {
        let log = simulate_adoptions(&graph, &SynthConfig { alpha, ..small.clone() })?;
        println!("alpha {alpha}: gini {:.3}", gini(&log.item_popularity()));
    }
    Ok(())
}
