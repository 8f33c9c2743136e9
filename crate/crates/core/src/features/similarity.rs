use crate::corpus::{AdoptionLog, ItemId};
use crate::windows::{median, CascadeWindow};

/// Adopters need at least this many distinct prior adoptions to enter the comparison.
pub const MIN_HISTORY: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityFeatures {
    pub count: usize,
    /// `(mean, median, max)`; `None` when no pair was comparable.
    pub summary: Option<(f64, f64, f64)>,
}

/// |A ∩ B| / |A ∪ B| over sorted, de-duplicated slices. Two empty sets give 0.
pub fn jaccard(a: &[ItemId], b: &[ItemId]) -> f64 {
    let (mut i, mut j, mut inter) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Pairwise Jaccard similarity of the adopters' histories before the window end,
/// with the window's own item removed from every history.
pub fn similarity_features(window: &CascadeWindow, log: &AdoptionLog) -> SimilarityFeatures {
    let histories: Vec<Vec<ItemId>> = window
        .adopters
        .iter()
        .map(|&u| {
            let mut items = log.distinct_items_before(u, window.window_end);
            items.retain(|&i| i != window.item);
            items
        })
        .filter(|h| h.len() >= MIN_HISTORY)
        .collect();
    let mut sims = Vec::new();
    for i in 0..histories.len() {
        for j in i + 1..histories.len() {
            sims.push(jaccard(&histories[i], &histories[j]));
        }
    }
    similarity_summary(sims)
}

pub(crate) fn similarity_summary(sims: Vec<f64>) -> SimilarityFeatures {
    let count = sims.len();
    if count == 0 {
        return SimilarityFeatures { count, summary: None };
    }
    let mean = sims.iter().sum::<f64>() / count as f64;
    let max = sims.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    SimilarityFeatures {
        count,
        summary: Some((mean, median(sims), max)),
    }
}
