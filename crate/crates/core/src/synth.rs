//! Seeded synthetic follow graphs and adoption cascades.
//!
//! Items spread over a preferential-attachment follow graph in daily steps.
//! Each item has a log-normal quality that scales every adoption hazard, and
//! the network hazard grows with the number of adopters so far (cumulative
//! advantage).

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, LogNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{AdoptionEvent, AdoptionLog, Interner, ItemId, SocialGraph, UserId, SECONDS_PER_DAY};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub n_users: usize,
    /// Follow edges created by each arriving user.
    pub attach_m: usize,
    pub n_items: usize,
    pub horizon_days: u32,
    pub seed: u64,
    /// Log-normal shape of item quality; the location keeps mean quality at 1.
    pub quality_sigma: f64,
    /// Base per-day adoption hazard for a user following at least one adopter.
    pub p0: f64,
    /// Cumulative-advantage strength.
    pub alpha: f64,
    /// Per-day out-of-network adoption hazard.
    pub epsilon: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_users: 20_000,
            attach_m: 8,
            n_items: 50_000,
            horizon_days: 60,
            seed: 42,
            quality_sigma: 1.0,
            p0: 0.02,
            alpha: 0.5,
            epsilon: 1e-5,
        }
    }
}

/// Named presets.
pub const PROFILES: [&str; 3] = ["default", "fast", "slow"];

impl SynthConfig {
    /// `default`, or the `fast` / `slow` timescale presets.
    ///
    /// `fast` is network-driven (median time to 5 adopters about 1.5 days) and
    /// `slow` relies on out-of-network adoption (about 7 days). Both use fewer
    /// items than `default`.
    pub fn profile(name: &str) -> Result<Self> {
        let base = Self::default();
        match name {
            "default" => Ok(base),
            "fast" => Ok(Self {
                p0: 0.9,
                epsilon: 1e-7,
                n_items: PRESET_ITEMS,
                ..base
            }),
            "slow" => Ok(Self {
                p0: 0.08,
                epsilon: 1e-6,
                n_items: PRESET_ITEMS,
                ..base
            }),
            other => Err(Error::InvalidArgument(format!(
                "unknown synth profile `{other}` (expected one of {PROFILES:?})"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n_users < self.attach_m + 1 {
            return bad(format!("n_users ({}) must exceed attach_m ({})", self.n_users, self.attach_m));
        }
        if self.n_items == 0 || self.horizon_days == 0 {
            return bad("n_items and horizon_days must be positive".into());
        }
        for (name, v) in [("p0", self.p0), ("epsilon", self.epsilon)] {
            if !(0.0..1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1), got {v}"));
            }
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be ≥ 0, got {}", self.alpha));
        }
        if !(self.quality_sigma >= 0.0 && self.quality_sigma.is_finite()) {
            return bad(format!("quality_sigma must be ≥ 0, got {}", self.quality_sigma));
        }
        Ok(())
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }
}

const PRESET_ITEMS: usize = 20_000;

/// Independent stream per (seed, purpose, index).
fn stream(seed: u64, purpose: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose << 48 | index);
    rng
}

const GRAPH_STREAM: u64 = 1;
const ITEM_STREAM: u64 = 2;

/// Directed preferential attachment: the first `attach_m` users start with no
/// edges, then each arriving user follows `attach_m` distinct earlier users
/// chosen with probability proportional to follower count + 1.
pub fn generate_graph(config: &SynthConfig) -> Result<SocialGraph> {
    config.validate()?;
    let (n, m) = (config.n_users, config.attach_m);
    let mut rng = stream(config.seed, GRAPH_STREAM, 0);
    // Every node appears once for the +1, plus once per follower it has.
    let mut pool: Vec<u32> = (0..m as u32).collect();
    let mut edges = Vec::with_capacity(m * n.saturating_sub(m));
    let mut picked: Vec<u32> = Vec::with_capacity(m);
    for v in m..n {
        picked.clear();
        while picked.len() < m {
            let target = pool[rng.random_range(0..pool.len())];
            if !picked.contains(&target) {
                picked.push(target);
            }
        }
        for &t in &picked {
            edges.push((v as u32, t));
            pool.push(t);
        }
        pool.push(v as u32);
    }
    Ok(SocialGraph::from_edges(true, Interner::sequential(n), edges))
}

const NOT_ADOPTED: u32 = u32::MAX;

/// Reusable per-worker scratch state, stamped per item to avoid clearing.
struct Workspace {
    adopted_stamp: Vec<u32>,
    exposed_stamp: Vec<u32>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            adopted_stamp: vec![NOT_ADOPTED; n],
            exposed_stamp: vec![NOT_ADOPTED; n],
        }
    }
}

/// Number of trials until the first success, minus one; `u64::MAX` for `p = 0`.
fn geometric_skip(rng: &mut ChaCha8Rng, p: f64) -> u64 {
    if p >= 1.0 {
        return 0;
    }
    if p <= 0.0 {
        return u64::MAX;
    }
    let u: f64 = rng.random::<f64>();
    let skip = ((1.0 - u).ln() / (1.0 - p).ln()).floor();
    if skip >= u64::MAX as f64 {
        u64::MAX
    } else {
        skip as u64
    }
}

fn simulate_item(graph: &SocialGraph, config: &SynthConfig, item: u32, ws: &mut Workspace) -> Vec<AdoptionEvent> {
    let n = graph.node_count();
    let mut rng = stream(config.seed, ITEM_STREAM, item as u64);
    let sigma = config.quality_sigma;
    let quality = if sigma > 0.0 {
        LogNormal::new(-sigma * sigma / 2.0, sigma)
            .expect("valid log-normal")
            .sample(&mut rng)
    } else {
        1.0
    };
    let seed_user = rng.random_range(0..n as u32);
    let start_day = rng.random_range(0..config.horizon_days) as u64;

    let mut cascade = Cascade {
        graph,
        item,
        events: Vec::new(),
        exposed: Vec::new(),
    };
    cascade.adopt(ws, seed_user, start_day, &mut rng);

    let spontaneous_p = (config.epsilon * quality).min(1.0);
    let mut today: Vec<u32> = Vec::new();
    for day in start_day + 1..config.horizon_days as u64 {
        let count = cascade.events.len() as f64;
        let network_p = (config.p0 * quality * (1.0 + config.alpha * count)).min(1.0);
        today.clear();

        cascade.exposed.retain(|&u| ws.adopted_stamp[u as usize] != item);
        let mut i = geometric_skip(&mut rng, network_p);
        while i < cascade.exposed.len() as u64 {
            today.push(cascade.exposed[i as usize]);
            i = i.saturating_add(1).saturating_add(geometric_skip(&mut rng, network_p));
        }

        let remaining = (n - cascade.events.len()) as u64;
        if spontaneous_p > 0.0 && remaining > 0 {
            let k = Binomial::new(remaining, spontaneous_p)
                .expect("valid binomial")
                .sample(&mut rng);
            let mut drawn = 0;
            while drawn < k {
                let u = rng.random_range(0..n as u32);
                if ws.adopted_stamp[u as usize] != item && !today.contains(&u) {
                    today.push(u);
                    drawn += 1;
                }
            }
        }

        for &u in &today {
            cascade.adopt(ws, u, day, &mut rng);
        }
        if cascade.events.len() == n {
            break;
        }
    }
    cascade.events
}

struct Cascade<'g> {
    graph: &'g SocialGraph,
    item: u32,
    events: Vec<AdoptionEvent>,
    /// Non-adopters following at least one adopter (may hold stale adopters until compacted).
    exposed: Vec<u32>,
}

impl Cascade<'_> {
    fn adopt(&mut self, ws: &mut Workspace, user: u32, day: u64, rng: &mut ChaCha8Rng) {
        let stamp = self.item;
        ws.adopted_stamp[user as usize] = stamp;
        self.events.push(AdoptionEvent {
            time: day * SECONDS_PER_DAY + rng.random_range(0..SECONDS_PER_DAY),
            user: UserId(user),
            item: ItemId(self.item),
        });
        for &f in self.graph.followers(user) {
            if ws.adopted_stamp[f as usize] != stamp && ws.exposed_stamp[f as usize] != stamp {
                ws.exposed_stamp[f as usize] = stamp;
                self.exposed.push(f);
            }
        }
    }
}

/// Runs the cascade simulation for every item. Per-item random streams make the
/// result independent of thread count.
pub fn simulate_adoptions(graph: &SocialGraph, config: &SynthConfig) -> Result<AdoptionLog> {
    config.validate()?;
    if graph.node_count() == 0 {
        return Err(Error::InvalidArgument("cannot simulate on an empty graph".into()));
    }
    let n = graph.node_count();
    let per_item: Vec<Vec<AdoptionEvent>> = (0..config.n_items as u32)
        .into_par_iter()
        .map_init(|| Workspace::new(n), |ws, item| simulate_item(graph, config, item, ws))
        .collect();
    let events: Vec<AdoptionEvent> = per_item.into_iter().flatten().collect();
    Ok(AdoptionLog::from_events(
        graph.nodes().clone(),
        Interner::sequential(config.n_items),
        events,
    ))
}

/// Graph and log for a config.
pub fn generate(config: &SynthConfig) -> Result<(SocialGraph, AdoptionLog)> {
    let graph = generate_graph(config)?;
    let log = simulate_adoptions(&graph, config)?;
    log::info!(
        "synthesized {} users, {} follow edges, {} adoptions over {} items",
        graph.node_count(),
        graph.edge_count(),
        log.len(),
        config.n_items
    );
    Ok((graph, log))
}

/// Writes `graph.tsv`, `adoptions.tsv` and `synth.toml` into `dir`.
pub fn write_dataset(dir: impl AsRef<Path>, config: &SynthConfig, graph: &SocialGraph, log: &AdoptionLog) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    graph.write_tsv(dir.join("graph.tsv"))?;
    log.write_tsv(dir.join("adoptions.tsv"))?;
    let p = dir.join("synth.toml");
    std::fs::write(&p, config.to_toml()?).map_err(|e| Error::io(&p, e))
}

/// Share of all adoptions held by the most popular `fraction` of items.
pub fn top_share(popularity: &[usize], fraction: f64) -> f64 {
    let mut sorted = popularity.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let total: usize = sorted.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let top = ((sorted.len() as f64 * fraction).ceil() as usize).min(sorted.len());
    sorted[..top].iter().sum::<usize>() as f64 / total as f64
}

/// Gini coefficient of a non-negative distribution.
pub fn gini(values: &[usize]) -> f64 {
    let mut v: Vec<f64> = values.iter().map(|&x| x as f64).collect();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let total: f64 = v.iter().sum();
    if total == 0.0 || v.is_empty() {
        return 0.0;
    }
    let weighted: f64 = v.iter().enumerate().map(|(i, x)| (2.0 * (i as f64 + 1.0) - n - 1.0) * x).sum();
    weighted / (n * total)
}
