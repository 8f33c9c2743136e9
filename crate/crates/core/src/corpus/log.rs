use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::graph::{data_lines, parse_fields};
use super::intern::Interner;
use crate::error::{Error, Result};

/// Seconds since the Unix epoch.
pub type Timestamp = u64;

pub const SECONDS_PER_DAY: u64 = 86_400;

pub fn days(n: u64) -> u64 {
    n * SECONDS_PER_DAY
}

pub fn to_days(seconds: u64) -> f64 {
    seconds as f64 / SECONDS_PER_DAY as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UserId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ItemId(pub u32);

/// One adoption. Field order gives the canonical (time, user, item) sort key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AdoptionEvent {
    pub time: Timestamp,
    pub user: UserId,
    pub item: ItemId,
}

/// Time-ordered adoption events with per-item and per-user indexes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdoptionLog {
    users: Interner,
    items: Interner,
    events: Vec<AdoptionEvent>,
    item_offsets: Vec<usize>,
    item_index: Vec<u32>,
    user_offsets: Vec<usize>,
    user_index: Vec<u32>,
    last_timestamp: Timestamp,
}

fn build_index(n: usize, keys: impl Iterator<Item = usize> + Clone) -> (Vec<usize>, Vec<u32>) {
    let mut offsets = vec![0usize; n + 1];
    for k in keys.clone() {
        offsets[k + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut index = vec![0u32; offsets[n]];
    for (pos, k) in keys.enumerate() {
        index[fill[k]] = pos as u32;
        fill[k] += 1;
    }
    (offsets, index)
}

impl AdoptionLog {
    /// Sorts `events` into canonical order and builds both indexes.
    pub fn from_events(users: Interner, items: Interner, mut events: Vec<AdoptionEvent>) -> Self {
        for e in &events {
            assert!((e.user.0 as usize) < users.len(), "user id out of range");
            assert!((e.item.0 as usize) < items.len(), "item id out of range");
        }
        events.sort_unstable();
        let (item_offsets, item_index) = build_index(items.len(), events.iter().map(|e| e.item.0 as usize));
        let (user_offsets, user_index) = build_index(users.len(), events.iter().map(|e| e.user.0 as usize));
        let last_timestamp = events.last().map_or(0, |e| e.time);
        Self {
            users,
            items,
            events,
            item_offsets,
            item_index,
            user_offsets,
            user_index,
            last_timestamp,
        }
    }

    pub fn users(&self) -> &Interner {
        &self.users
    }

    pub fn items(&self) -> &Interner {
        &self.items
    }

    pub fn user(&self, name: &str) -> Option<UserId> {
        self.users.get(name).map(UserId)
    }

    pub fn item(&self, name: &str) -> Option<ItemId> {
        self.items.get(name).map(ItemId)
    }

    pub fn events(&self) -> &[AdoptionEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn last_timestamp(&self) -> Timestamp {
        self.last_timestamp
    }

    pub fn item_count(&self) -> usize {
        self.items.len()
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    /// Events of `item` in global order.
    pub fn item_events(&self, item: ItemId) -> impl ExactSizeIterator<Item = &AdoptionEvent> + Clone + '_ {
        let i = item.0 as usize;
        self.item_index[self.item_offsets[i]..self.item_offsets[i + 1]]
            .iter()
            .map(move |&p| &self.events[p as usize])
    }

    /// Events of `user` in global order.
    pub fn user_events(&self, user: UserId) -> impl ExactSizeIterator<Item = &AdoptionEvent> + Clone + '_ {
        let (lo, hi) = self.user_range(user);
        self.user_index[lo..hi].iter().map(move |&p| &self.events[p as usize])
    }

    fn user_range(&self, user: UserId) -> (usize, usize) {
        let u = user.0 as usize;
        if u >= self.users.len() {
            return (0, 0);
        }
        (self.user_offsets[u], self.user_offsets[u + 1])
    }

    /// Index positions of the user's events with time < `cutoff`, as a slice range.
    fn user_prefix(&self, user: UserId, cutoff: Timestamp) -> &[u32] {
        let (lo, hi) = self.user_range(user);
        let slice = &self.user_index[lo..hi];
        let n = slice.partition_point(|&p| self.events[p as usize].time < cutoff);
        &slice[..n]
    }

    /// Distinct items the user adopted strictly before `cutoff`. Unknown users yield an empty set.
    pub fn user_adoptions_before(&self, user: UserId, cutoff: Timestamp) -> BTreeSet<ItemId> {
        self.user_prefix(user, cutoff)
            .iter()
            .map(|&p| self.events[p as usize].item)
            .collect()
    }

    /// Same as [`Self::user_adoptions_before`] as a sorted, de-duplicated vector.
    pub fn distinct_items_before(&self, user: UserId, cutoff: Timestamp) -> Vec<ItemId> {
        let mut items: Vec<ItemId> = self
            .user_prefix(user, cutoff)
            .iter()
            .map(|&p| self.events[p as usize].item)
            .collect();
        items.sort_unstable();
        items.dedup();
        items
    }

    /// Number of the user's events with `start <= time < end`.
    pub fn count_adoptions_in(&self, user: UserId, start: Timestamp, end: Timestamp) -> Result<usize> {
        if start > end {
            return Err(Error::InvalidArgument(format!("window start {start} after end {end}")));
        }
        Ok(self.user_prefix(user, end).len() - self.user_prefix(user, start).len())
    }

    /// Time of the user's first adoption, if any.
    pub fn first_adoption(&self, user: UserId) -> Option<Timestamp> {
        self.user_events(user).next().map(|e| e.time)
    }

    /// Distinct adopter count per item over the whole log.
    pub fn item_popularity(&self) -> Vec<usize> {
        (0..self.item_count() as u32)
            .map(|i| {
                let mut users: Vec<UserId> = self.item_events(ItemId(i)).map(|e| e.user).collect();
                users.sort_unstable();
                users.dedup();
                users.len()
            })
            .collect()
    }

    pub fn write_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        for e in &self.events {
            writeln!(w, "{}\t{}\t{}", self.users.name(e.user.0), self.items.name(e.item.0), e.time)
                .map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Loads a `user \t item \t unix_seconds` adoption log. Lines need not be sorted.
pub fn load_adoptions(path: impl AsRef<Path>) -> Result<AdoptionLog> {
    let path = path.as_ref();
    let lines = data_lines(path)?;
    let mut raw = Vec::with_capacity(lines.len());
    for (lineno, line) in &lines {
        let f = parse_fields(path, *lineno, line, 3)?;
        let time: Timestamp = f[2]
            .parse()
            .map_err(|_| Error::parse(path, *lineno, format!("timestamp `{}` is not a non-negative integer", f[2])))?;
        raw.push((f[0].to_string(), f[1].to_string(), time));
    }
    let users = Interner::from_names(raw.iter().map(|r| r.0.clone()));
    let items = Interner::from_names(raw.iter().map(|r| r.1.clone()));
    let events = raw
        .iter()
        .map(|(u, i, t)| AdoptionEvent {
            time: *t,
            user: UserId(users.get(u).unwrap()),
            item: ItemId(items.get(i).unwrap()),
        })
        .collect();
    let log = AdoptionLog::from_events(users, items, events);
    log::info!(
        "loaded {} adoptions of {} items by {} users from {}",
        log.len(),
        log.item_count(),
        log.user_count(),
        path.display()
    );
    Ok(log)
}
