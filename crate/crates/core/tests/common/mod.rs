//! Brute-force reference implementations and random corpora shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use peekpop::corpus::{AdoptionEvent, AdoptionLog, Corpus, Interner, ItemId, SocialGraph, UserId, UserMeta};
use peekpop::features::{featurize_window, FeatureSchema};
use peekpop::windows::CascadeWindow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DAY: u64 = 86_400;

/// A small random world described by plain vectors.
#[derive(Debug, Clone)]
pub struct Case {
    pub directed: bool,
    pub n_nodes: u32,
    /// Raw follow arcs by node number; may contain duplicates and self-loops.
    pub edges: Vec<(u32, u32)>,
    /// `(user, item, time)`; users `>= n_nodes` are absent from the graph.
    pub events: Vec<(u32, u32, u64)>,
    pub meta: Option<Vec<(u32, u64)>>,
    pub item: u32,
    pub k: usize,
    /// Matching window for a k-t window, in days.
    pub match_days: Option<u32>,
}

pub fn random_case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_nodes = rng.random_range(2..=20u32);
    let directed = rng.random_bool(0.7);
    let density = rng.random_range(0.0..0.5);
    let mut edges = Vec::new();
    for u in 0..n_nodes {
        for v in 0..n_nodes {
            if rng.random_bool(density) {
                edges.push((u, v));
            }
        }
    }
    let n_users = n_nodes + rng.random_range(0..4);
    let n_items = rng.random_range(2..=15u32);
    let k = rng.random_range(2..=5usize).min(n_users as usize);
    let span = 40 * DAY;
    let item = 0;
    let mut events = Vec::new();
    for _ in 0..rng.random_range(0..300) {
        events.push((
            rng.random_range(0..n_users),
            rng.random_range(1..n_items),
            rng.random_range(0..span),
        ));
    }
    // The focal item: k distinct early adopters (some tied in time), then
    // later adopters that fall outside a k-t window.
    let match_days = rng.random_bool(0.4).then(|| rng.random_range(1..=10u32));
    let early_span = match_days.map_or(10 * DAY, |t| t as u64 * DAY);
    let first = rng.random_range(0..span / 2);
    let mut users: Vec<u32> = (0..n_users).collect();
    let mut last = first;
    for i in 0..k {
        let j = rng.random_range(i..users.len());
        users.swap(i, j);
        let t = match i {
            0 => first,
            _ if rng.random_bool(0.2) => last,
            _ => first + rng.random_range(0..early_span),
        };
        last = t;
        events.push((users[i], item, t));
        if rng.random_bool(0.1) {
            events.push((users[i], item, t + rng.random_range(0..early_span)));
        }
    }
    for _ in 0..rng.random_range(0..6) {
        let t = first + early_span + rng.random_range(0..span);
        events.push((rng.random_range(0..n_users), item, t));
    }
    let meta = if rng.random_bool(0.5) {
        let mut m = Vec::new();
        for u in 0..n_users {
            if rng.random_bool(0.7) {
                m.push((u, rng.random_range(0..span)));
            }
        }
        Some(m)
    } else {
        None
    };
    Case {
        directed,
        n_nodes,
        edges,
        events,
        meta,
        item,
        k,
        match_days,
    }
}

impl Case {
    pub fn corpus(&self) -> Corpus {
        let graph = SocialGraph::from_edges(
            self.directed,
            Interner::sequential(self.n_nodes as usize),
            self.edges.iter().copied(),
        );
        let users = Interner::from_names(self.events.iter().map(|e| e.0.to_string()));
        let items = Interner::from_names(self.events.iter().map(|e| e.1.to_string()));
        let events = self
            .events
            .iter()
            .map(|&(u, i, t)| AdoptionEvent {
                time: t,
                user: UserId(users.get(&u.to_string()).unwrap()),
                item: ItemId(items.get(&i.to_string()).unwrap()),
            })
            .collect();
        let log = AdoptionLog::from_events(users, items, events);
        let meta = self.meta.as_ref().map(|m| {
            let entries: Vec<(UserId, u64)> = m
                .iter()
                .filter_map(|&(u, t)| log.user(&u.to_string()).map(|id| (id, t)))
                .collect();
            UserMeta::new(&log, entries)
        });
        Corpus::new(log, graph, meta)
    }

    /// Events in canonical order: time, then user, then item.
    fn sorted_events(&self) -> Vec<(u64, u32, u32)> {
        let mut ev: Vec<(u64, u32, u32)> = self.events.iter().map(|&(u, i, t)| (t, u, i)).collect();
        ev.sort();
        ev
    }

    /// First `k` distinct adopters of the focal item with their times, and the window end.
    pub fn oracle_window(&self) -> Option<(Vec<u32>, Vec<u64>, u64)> {
        let mut adopters: Vec<(u32, u64)> = Vec::new();
        for (t, u, i) in self.sorted_events() {
            if i == self.item && !adopters.iter().any(|&(a, _)| a == u) {
                adopters.push((u, t));
            }
        }
        match self.match_days {
            None => {
                adopters.truncate(self.k);
                let end = adopters.last()?.1;
                Some((adopters.iter().map(|a| a.0).collect(), adopters.iter().map(|a| a.1).collect(), end))
            }
            Some(t) => {
                let end = adopters[0].1 + t as u64 * DAY;
                adopters.retain(|a| a.1 < end);
                if adopters.len() != self.k {
                    return None;
                }
                Some((adopters.iter().map(|a| a.0).collect(), adopters.iter().map(|a| a.1).collect(), end))
            }
        }
    }

    pub fn schema(&self) -> FeatureSchema {
        FeatureSchema::new(self.k, self.match_days)
    }

    /// The library's feature row for the oracle's window, keyed by feature name.
    pub fn library_features(&self) -> Option<BTreeMap<String, Option<f64>>> {
        let (adopters, times, end) = self.oracle_window()?;
        let corpus = self.corpus();
        let log = &corpus.log;
        let window = CascadeWindow {
            item: log.item(&self.item.to_string()).unwrap(),
            adopters: adopters.iter().map(|u| log.user(&u.to_string()).unwrap()).collect(),
            adopter_times: times,
            window_end: end,
            final_popularity: 0,
            label: 0,
        };
        let (values, missing) = featurize_window(&window, &corpus, self.match_days);
        let schema = self.schema();
        Some(
            schema
                .names()
                .zip(values.iter().zip(&missing))
                .map(|(n, (&v, &m))| (n.to_string(), (!m).then_some(v)))
                .collect(),
        )
    }

    /// Every feature recomputed from the raw vectors with adjacency matrices,
    /// Floyd-Warshall and explicit set arithmetic.
    pub fn oracle_features(&self) -> Option<BTreeMap<String, Option<f64>>> {
        let (adopters, times, end) = self.oracle_window()?;
        let k = self.k;
        let n = self.n_nodes as usize;
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in &self.edges {
            if u != v {
                adj[u as usize][v as usize] = true;
                if !self.directed {
                    adj[v as usize][u as usize] = true;
                }
            }
        }
        let node = |u: u32| (u < self.n_nodes).then_some(u as usize);
        let followers = |u: u32| -> BTreeSet<usize> {
            node(u).map_or_else(BTreeSet::new, |v| (0..n).filter(|&w| adj[w][v]).collect())
        };
        let in_set: BTreeSet<usize> = adopters.iter().filter_map(|&u| node(u)).collect();

        let mut f: BTreeMap<String, Option<f64>> = BTreeMap::new();
        let mut put = |name: String, v: Option<f64>| {
            f.insert(name, v);
        };

        // temporal
        let d = |s: u64| s as f64 / DAY as f64;
        for i in 2..=k {
            put(format!("time_{i}"), Some(d(times[i - 1] - times[0])));
        }
        let gaps: Vec<f64> = (1..k).map(|i| d(times[i] - times[i - 1])).collect();
        let half = (k - 1) / 2;
        let mean = |xs: &[f64]| if xs.is_empty() { 0.0 } else { xs.iter().sum::<f64>() / xs.len() as f64 };
        put("time_first_half".into(), Some(mean(&gaps[..half])));
        put("time_second_half".into(), Some(mean(&gaps[half..])));

        // ego
        for (i, &u) in adopters.iter().enumerate().skip(1) {
            put(format!("in_{}", i + 1), Some(followers(u).len() as f64));
        }
        let mut exposed = BTreeSet::new();
        for &u in &adopters {
            exposed.extend(followers(u));
        }
        put("reach".into(), Some(exposed.difference(&in_set).count() as f64));
        let mut connections = 0;
        for a in 0..n {
            for b in 0..n {
                let touches = in_set.contains(&a) || in_set.contains(&b);
                if adj[a][b] && touches && (self.directed || a < b) {
                    connections += 1;
                }
            }
        }
        put("connections".into(), Some(connections as f64));

        // subgraph
        let pos: Vec<Option<usize>> = adopters.iter().map(|&u| node(u)).collect();
        let sub = |i: usize, j: usize| matches!((pos[i], pos[j]), (Some(a), Some(b)) if adj[a][b]);
        let mut density = 0;
        for i in 0..k {
            for j in 0..k {
                if i != j && sub(i, j) && (self.directed || i < j) {
                    density += 1;
                }
            }
        }
        const INF: usize = usize::MAX / 4;
        let mut dist = vec![vec![INF; k]; k];
        for i in 0..k {
            dist[i][i] = 0;
            for j in 0..k {
                if i != j && (sub(i, j) || sub(j, i)) {
                    dist[i][j] = 1;
                }
            }
        }
        for m in 0..k {
            for i in 0..k {
                for j in 0..k {
                    dist[i][j] = dist[i][j].min(dist[i][m] + dist[m][j]);
                }
            }
        }
        let mut components = 0;
        for i in 0..k {
            if (0..i).all(|j| dist[i][j] >= INF) {
                components += 1;
            }
        }
        let pair_d: Vec<usize> = (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .map(|(i, j)| dist[i][j])
            .filter(|&x| x < INF)
            .collect();
        let indegree: usize = adopters.iter().map(|&u| followers(u).len()).sum();
        put("indegree_sub".into(), Some(indegree as f64 / k as f64));
        put("density_sub".into(), Some(density as f64));
        put("cc_sub".into(), Some(components as f64));
        put(
            "dist_sub".into(),
            (!pair_d.is_empty()).then(|| pair_d.iter().sum::<usize>() as f64 / pair_d.len() as f64),
        );
        for j in 0..k {
            let c = (0..k).filter(|&i| i != j && sub(i, j)).count();
            put(format!("sub_in_{}", j + 1), Some(c as f64));
        }

        // root and resharers
        let events = self.sorted_events();
        let first_adoption = |u: u32| events.iter().find(|e| e.1 == u).map(|e| e.0);
        let registration = |u: u32| -> Option<u64> {
            let first = first_adoption(u);
            match &self.meta {
                Some(m) => match m.iter().find(|e| e.0 == u) {
                    Some(&(_, r)) => Some(first.map_or(r, |f| r.min(f))),
                    None => first,
                },
                None => first,
            }
        };
        let start = end.saturating_sub(28 * DAY);
        let user = |u: u32| -> [f64; 3] {
            let activity = events.iter().filter(|e| e.1 == u && e.0 >= start && e.0 < end).count();
            let age = registration(u).map_or(0.0, |r| d(end.saturating_sub(r)));
            [activity as f64, age, followers(u).len() as f64]
        };
        let root = user(adopters[0]);
        let mut resharer = [0.0; 3];
        for &u in &adopters[1..] {
            for (s, v) in resharer.iter_mut().zip(user(u)) {
                *s += v / (k - 1) as f64;
            }
        }
        for (i, name) in ["activity", "age", "popularity"].iter().enumerate() {
            put(format!("{name}_root"), Some(root[i]));
            put(format!("{name}_resharer"), Some(resharer[i]));
        }

        // similarity
        let histories: Vec<BTreeSet<u32>> = adopters
            .iter()
            .map(|&u| {
                events
                    .iter()
                    .filter(|e| e.1 == u && e.0 < end && e.2 != self.item)
                    .map(|e| e.2)
                    .collect()
            })
            .filter(|h: &BTreeSet<u32>| h.len() >= 5)
            .collect();
        let mut sims = Vec::new();
        for i in 0..histories.len() {
            for j in i + 1..histories.len() {
                let inter = histories[i].intersection(&histories[j]).count();
                let union = histories[i].union(&histories[j]).count();
                sims.push(inter as f64 / union as f64);
            }
        }
        put("sim_count".into(), Some(sims.len() as f64));
        if sims.is_empty() {
            for s in ["sim_mean", "sim_med", "sim_max"] {
                put(s.into(), None);
            }
        } else {
            sims.sort_by(f64::total_cmp);
            let m = sims.len();
            let med = if m % 2 == 1 { sims[m / 2] } else { (sims[m / 2 - 1] + sims[m / 2]) / 2.0 };
            put("sim_mean".into(), Some(sims.iter().sum::<f64>() / m as f64));
            put("sim_med".into(), Some(med));
            put("sim_max".into(), Some(sims[m - 1]));
        }

        // daily counts
        if let Some(t) = self.match_days {
            for day in 1..=t as u64 {
                let c = times
                    .iter()
                    .filter(|&&x| x >= times[0] + (day - 1) * DAY && x < times[0] + day * DAY)
                    .count();
                put(format!("adoptions_{day}"), Some(c as f64));
            }
        }
        Some(f)
    }

    /// `Ok(checked)` when every feature agrees: integer-valued features exactly,
    /// real-valued ones within `1e-12`.
    pub fn check_features(&self) -> Result<usize, String> {
        let (Some(lib), Some(oracle)) = (self.library_features(), self.oracle_features()) else {
            return Ok(0);
        };
        if lib.keys().ne(oracle.keys()) {
            return Err(format!("feature names differ: {:?} vs {:?}", lib.keys(), oracle.keys()));
        }
        for (name, want) in &oracle {
            let got = lib[name];
            let ok = match (got, *want) {
                (None, None) => true,
                (Some(a), Some(b)) if b.fract() == 0.0 && !is_real(name) => a == b,
                (Some(a), Some(b)) => (a - b).abs() <= 1e-12,
                _ => false,
            };
            if !ok {
                return Err(format!("{name}: library {got:?}, oracle {want:?} in {self:?}"));
            }
        }
        Ok(oracle.len())
    }
}

fn is_real(name: &str) -> bool {
    name.starts_with("time_")
        || name.starts_with("sim_m")
        || name.starts_with("age_")
        || name.ends_with("_resharer")
        || name == "indegree_sub"
        || name == "dist_sub"
}

/// Median with the mean of the middle pair for even sizes.
pub fn oracle_median(values: &[usize]) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
    }
}
