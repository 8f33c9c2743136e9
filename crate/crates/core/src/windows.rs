//! Prediction cohorts: censoring, early-adoption windows and median-split labels.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{days, to_days, AdoptionLog, ItemId, Timestamp, UserId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// Items with at least `k` adopters; the window closes at the k-th adoption.
    FixedK,
    /// Items with exactly `k` adopters in the first `t` days.
    #[serde(rename = "kt")]
    KT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohortSpec {
    pub k: usize,
    pub horizon_days: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub match_days: Option<u32>,
    pub formulation: Formulation,
}

impl CohortSpec {
    pub fn fixed_k(k: usize, horizon_days: u32) -> Self {
        Self {
            k,
            horizon_days,
            match_days: None,
            formulation: Formulation::FixedK,
        }
    }

    pub fn kt(k: usize, horizon_days: u32, match_days: u32) -> Self {
        Self {
            k,
            horizon_days,
            match_days: Some(match_days),
            formulation: Formulation::KT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidArgument(format!("k must be ≥ 2, got {}", self.k)));
        }
        if self.horizon_days < 1 {
            return Err(Error::InvalidArgument("horizon T must be ≥ 1 day".into()));
        }
        match (self.formulation, self.match_days) {
            (Formulation::FixedK, None) => Ok(()),
            (Formulation::FixedK, Some(_)) => Err(Error::InvalidArgument("fixed-k cohorts take no matching window t".into())),
            (Formulation::KT, None) => Err(Error::InvalidArgument("k-t cohorts need a matching window t".into())),
            (Formulation::KT, Some(t)) if t < 1 || t > self.horizon_days => Err(Error::InvalidArgument(format!(
                "matching window t={t} must satisfy 1 ≤ t ≤ T={}",
                self.horizon_days
            ))),
            (Formulation::KT, Some(_)) => Ok(()),
        }
    }
}

/// One item's early-adoption period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeWindow {
    pub item: ItemId,
    pub adopters: Vec<UserId>,
    pub adopter_times: Vec<Timestamp>,
    pub window_end: Timestamp,
    pub final_popularity: usize,
    pub label: u8,
}

impl CascadeWindow {
    pub fn first_adoption(&self) -> Timestamp {
        self.adopter_times[0]
    }

    /// Days from first to last adopter in the window.
    pub fn time_to_last(&self) -> f64 {
        to_days(self.adopter_times[self.adopter_times.len() - 1] - self.adopter_times[0])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cohort {
    pub spec: CohortSpec,
    pub windows: Vec<CascadeWindow>,
    pub median_popularity: f64,
}

impl Cohort {
    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.windows.iter().map(|w| w.label).collect()
    }

    /// Median over windows of the days taken to reach the k-th adoption.
    pub fn median_time_to_k(&self) -> f64 {
        median(self.windows.iter().map(|w| w.time_to_last()).collect())
    }

    /// One JSON object per window, in cohort order.
    pub fn write_jsonl(&self, log: &AdoptionLog, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        for win in &self.windows {
            let rec = WindowRecord {
                item: log.items().name(win.item.0),
                adopters: win.adopters.iter().map(|u| log.users().name(u.0)).collect(),
                adopter_times: &win.adopter_times,
                window_end: win.window_end,
                final_popularity: win.final_popularity,
                label: win.label,
            };
            serde_json::to_writer(&mut w, &rec)?;
            w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

#[derive(Serialize)]
struct WindowRecord<'a> {
    item: &'a str,
    adopters: Vec<&'a str>,
    adopter_times: &'a [Timestamp],
    window_end: Timestamp,
    final_popularity: usize,
    label: u8,
}

/// Median of a list; mean of the two middle values for even lengths. NaN for empty input.
pub fn median(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Distinct adopters of `item` with `origin <= time < origin + horizon_days`.
pub fn popularity_at(log: &AdoptionLog, item: ItemId, origin: Timestamp, horizon_days: u32) -> usize {
    let end = origin + days(horizon_days as u64);
    let mut users: Vec<UserId> = log
        .item_events(item)
        .filter(|e| e.time >= origin && e.time < end)
        .map(|e| e.user)
        .collect();
    users.sort_unstable();
    users.dedup();
    users.len()
}

/// First occurrence of each distinct adopter before `end`, in event order.
fn distinct_adopters(log: &AdoptionLog, item: ItemId, end: Timestamp) -> Vec<(UserId, Timestamp)> {
    let mut out: Vec<(UserId, Timestamp)> = Vec::new();
    for e in log.item_events(item).take_while(|e| e.time < end) {
        if !out.iter().any(|&(u, _)| u == e.user) {
            out.push((e.user, e.time));
        }
    }
    out
}

fn censor_cutoff(log: &AdoptionLog, spec: &CohortSpec) -> Option<Timestamp> {
    log.last_timestamp().checked_sub(days(spec.horizon_days as u64))
}

fn window_for(log: &AdoptionLog, spec: &CohortSpec, item: ItemId, cutoff: Timestamp) -> Option<CascadeWindow> {
    let first = log.item_events(item).next()?.time;
    if first > cutoff {
        return None;
    }
    let horizon_end = first + days(spec.horizon_days as u64);
    let adopters = distinct_adopters(log, item, horizon_end);
    let final_popularity = adopters.len();
    let (early, window_end) = match spec.formulation {
        Formulation::FixedK => {
            if adopters.len() < spec.k {
                return None;
            }
            let early = &adopters[..spec.k];
            (early, early[spec.k - 1].1)
        }
        Formulation::KT => {
            let end = first + days(spec.match_days? as u64);
            let n = adopters.partition_point(|&(_, t)| t < end);
            if n != spec.k {
                return None;
            }
            (&adopters[..n], end)
        }
    };
    Some(CascadeWindow {
        item,
        adopters: early.iter().map(|&(u, _)| u).collect(),
        adopter_times: early.iter().map(|&(_, t)| t).collect(),
        window_end,
        final_popularity,
        label: 0,
    })
}

fn assemble(log: &AdoptionLog, spec: CohortSpec) -> Result<Cohort> {
    spec.validate()?;
    let Some(cutoff) = censor_cutoff(log, &spec) else {
        return Err(Error::CohortTooSmall(0));
    };
    let mut windows: Vec<CascadeWindow> = (0..log.item_count() as u32)
        .into_par_iter()
        .filter_map(|i| window_for(log, &spec, ItemId(i), cutoff))
        .collect();
    if windows.len() < 2 {
        return Err(Error::CohortTooSmall(windows.len()));
    }
    let median_popularity = median(windows.iter().map(|w| w.final_popularity as f64).collect());
    for w in &mut windows {
        w.label = u8::from(w.final_popularity as f64 > median_popularity);
    }
    Ok(Cohort {
        spec,
        windows,
        median_popularity,
    })
}

/// Balanced classification cohort: uncensored items with at least `k` distinct adopters within `T` days.
pub fn build_fixed_k_cohort(log: &AdoptionLog, spec: CohortSpec) -> Result<Cohort> {
    if spec.formulation != Formulation::FixedK {
        return Err(Error::InvalidArgument("expected a fixed-k spec".into()));
    }
    assemble(log, spec)
}

/// Temporally matched cohort: uncensored items with exactly `k` distinct adopters in `[first, first + t)`.
pub fn build_kt_cohort(log: &AdoptionLog, spec: CohortSpec) -> Result<Cohort> {
    if spec.formulation != Formulation::KT {
        return Err(Error::InvalidArgument("expected a k-t spec".into()));
    }
    assemble(log, spec)
}

pub fn build_cohort(log: &AdoptionLog, spec: CohortSpec) -> Result<Cohort> {
    match spec.formulation {
        Formulation::FixedK => build_fixed_k_cohort(log, spec),
        Formulation::KT => build_kt_cohort(log, spec),
    }
}
