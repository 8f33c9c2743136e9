//! Load a TSV adoption log, follow graph and registration table, then
//! round-trip the log and graph through the binary cache.
//!
//! ```text
//! cargo run --example ingest
//! ```

use std::fs;

use peekpop::corpus::{read_graph, read_log, write_graph, write_log, Corpus};

const ADOPTIONS: &str = "\
# user\titem\tunix_seconds
alice\tsong-1\t1000
bob\tsong-1\t1500
carol\tsong-1\t90000
bob\tsong-2\t2000
dave\tsong-2\t2100
alice\tsong-2\t400000
";

const GRAPH: &str = "\
# follower\tfollowed
bob\talice
carol\talice
carol\tbob
dave\tbob
";

const META: &str = "\
alice\t100
bob\t900
";

fn main() -> peekpop::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = |name: &str| dir.path().join(name);
    fs::write(path("adoptions.tsv"), ADOPTIONS).unwrap();
    fs::write(path("graph.tsv"), GRAPH).unwrap();
    fs::write(path("meta.tsv"), META).unwrap();

    let corpus = Corpus::load(path("adoptions.tsv"), path("graph.tsv"), true, Some(&path("meta.tsv")))?;
    let log = &corpus.log;
    println!("{} adoptions, {} users, {} items", log.len(), log.user_count(), log.item_count());
    println!("{} follow edges", corpus.graph.edge_count());

    for user in ["alice", "bob", "carol", "dave"] {
        let id = log.user(user).unwrap();
        println!(
            "{user:>5}: {} followers, registered at {:?}",
            corpus.follower_count(id),
            corpus.registration(id)
        );
    }

    write_log(log, path("log.bin"))?;
    write_graph(&corpus.graph, path("graph.bin"))?;
    let cached = read_log(path("log.bin"))?;
    let graph = read_graph(path("graph.bin"))?;
    assert_eq!(cached.events(), log.events());
    assert_eq!(graph.edge_count(), corpus.graph.edge_count());
    println!("binary cache round trip ok");
    Ok(())
}
