use crate::corpus::{to_days, SECONDS_PER_DAY};
use crate::windows::CascadeWindow;

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalFeatures {
    /// `time_i` for `i = 2..=k`, in days since the first adoption.
    pub time: Vec<f64>,
    pub first_half: f64,
    pub second_half: f64,
}

impl TemporalFeatures {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.time.iter().copied().chain([self.first_half, self.second_half])
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Adoption-speed features.
///
/// The `k - 1` inter-adoption gaps are split into the first `⌊(k-1)/2⌋` and
/// the remaining `⌈(k-1)/2⌉`; each half contributes its mean gap in days
/// (0 for an empty half, which only happens when `k = 2`).
pub fn temporal_features(window: &CascadeWindow) -> TemporalFeatures {
    temporal_from_times(&window.adopter_times)
}

pub(crate) fn temporal_from_times(times: &[u64]) -> TemporalFeatures {
    let t0 = times[0];
    let time = times[1..].iter().map(|&t| to_days(t - t0)).collect();
    let gaps: Vec<f64> = times.windows(2).map(|w| to_days(w[1] - w[0])).collect();
    let split = gaps.len() / 2;
    TemporalFeatures {
        time,
        first_half: mean(&gaps[..split]),
        second_half: mean(&gaps[split..]),
    }
}

/// `adoptions_i`: distinct new adopters in day `i` of the window, for `i = 1..=t`.
pub fn daily_adoption_features(window: &CascadeWindow, t_days: u32) -> Vec<f64> {
    let first = window.first_adoption();
    let mut bins = vec![0.0; t_days as usize];
    for &time in &window.adopter_times {
        let day = ((time - first) / SECONDS_PER_DAY) as usize;
        if let Some(b) = bins.get_mut(day) {
            *b += 1.0;
        }
    }
    bins
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ItemId, UserId};

    const D: u64 = SECONDS_PER_DAY;

    fn window(times: &[u64]) -> CascadeWindow {
        CascadeWindow {
            item: ItemId(0),
            adopters: (0..times.len() as u32).map(UserId).collect(),
            adopter_times: times.to_vec(),
            window_end: *times.last().unwrap(),
            final_popularity: times.len(),
            label: 0,
        }
    }

    #[test]
    fn hand_computed_gap_split() {
        let f = temporal_features(&window(&[0, 2 * D, 3 * D, 7 * D, 12 * D]));
        assert_eq!(f.time, [2.0, 3.0, 7.0, 12.0]);
        assert_eq!(f.first_half, 1.5);
        assert_eq!(f.second_half, 4.5);
    }

    #[test]
    fn simultaneous_adoptions_are_all_zero() {
        let f = temporal_features(&window(&[5; 5]));
        assert!(f.values().all(|v| v == 0.0));
        assert_eq!(f.values().count(), 6);
    }

    #[test]
    fn uniform_gaps_give_equal_halves() {
        for k in 2..9u64 {
            let times: Vec<u64> = (0..k).map(|i| 100 + i * 3 * D).collect();
            let f = temporal_features(&window(&times));
            assert_eq!(f.second_half, 3.0);
            if k > 2 {
                assert_eq!(f.first_half, 3.0);
            }
        }
    }

    #[test]
    fn daily_bins() {
        let w = window(&[0, D / 2, 9 * D / 10, 32 * D / 10, 33 * D / 10]);
        assert_eq!(daily_adoption_features(&w, 5), [3.0, 0.0, 0.0, 2.0, 0.0]);
        let w = window(&[0, D, 2 * D, 3 * D, 4 * D]);
        assert_eq!(daily_adoption_features(&w, 5), [1.0; 5]);
        let w = window(&[0, 10, 20, 30, 40]);
        assert_eq!(daily_adoption_features(&w, 1), [5.0]);
    }
}
