//! Adoption logs, follow graphs and user metadata.

mod cache;
mod graph;
mod intern;
mod log;
mod meta;

use std::path::Path;

pub use self::cache::{read_graph, read_log, write_graph, write_log, MAGIC as CACHE_MAGIC, VERSION as CACHE_VERSION};
pub use self::graph::{load_graph, SocialGraph};
pub use self::intern::Interner;
pub use self::log::{
    days, load_adoptions, to_days, AdoptionEvent, AdoptionLog, ItemId, Timestamp, UserId, SECONDS_PER_DAY,
};
pub use self::meta::{load_meta, UserMeta};

use crate::error::Result;

/// An adoption log joined with the follow graph it happened on.
///
/// Log users and graph nodes are matched by name; log users missing from the
/// graph behave as isolated nodes.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub log: AdoptionLog,
    pub graph: SocialGraph,
    pub meta: Option<UserMeta>,
    node_of: Vec<Option<u32>>,
}

impl Corpus {
    pub fn new(log: AdoptionLog, graph: SocialGraph, meta: Option<UserMeta>) -> Self {
        let node_of = log.users().names().iter().map(|n| graph.node(n)).collect();
        Self {
            log,
            graph,
            meta,
            node_of,
        }
    }

    /// Loads TSV inputs. `meta` is optional.
    pub fn load(
        adoptions: impl AsRef<Path>,
        graph: impl AsRef<Path>,
        directed: bool,
        meta: Option<&Path>,
    ) -> Result<Self> {
        let log = load_adoptions(adoptions)?;
        let graph = load_graph(graph, directed)?;
        let meta = meta.map(|p| load_meta(p, &log)).transpose()?;
        Ok(Self::new(log, graph, meta))
    }

    /// Graph node of a log user.
    pub fn node(&self, user: UserId) -> Option<u32> {
        self.node_of.get(user.0 as usize).copied().flatten()
    }

    pub fn follower_count(&self, user: UserId) -> usize {
        self.node(user).map_or(0, |v| self.graph.follower_count(v))
    }

    /// True when age features use first-adoption time instead of registration time.
    pub fn uses_age_proxy(&self) -> bool {
        self.meta.is_none()
    }

    /// Registration time, or the first adoption time when no metadata is loaded.
    pub fn registration(&self, user: UserId) -> Option<Timestamp> {
        match &self.meta {
            Some(m) => m.registration(user).or_else(|| self.log.first_adoption(user)),
            None => self.log.first_adoption(user),
        }
    }
}
