use crate::corpus::{days, to_days, Corpus, Timestamp, UserId};
use crate::windows::CascadeWindow;

/// Look-back for activity counts.
pub const ACTIVITY_WINDOW_DAYS: u64 = 28;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdopterFeatures {
    pub activity: f64,
    pub age: f64,
    pub popularity: f64,
}

impl AdopterFeatures {
    pub fn values(&self) -> [f64; 3] {
        [self.activity, self.age, self.popularity]
    }
}

fn user_features(corpus: &Corpus, user: UserId, window_end: Timestamp) -> AdopterFeatures {
    let start = window_end.saturating_sub(days(ACTIVITY_WINDOW_DAYS));
    let activity = corpus
        .log
        .count_adoptions_in(user, start, window_end)
        .expect("start <= end by construction");
    let age = corpus
        .registration(user)
        .map_or(0.0, |reg| to_days(window_end.saturating_sub(reg)));
    AdopterFeatures {
        activity: activity as f64,
        age,
        popularity: corpus.follower_count(user) as f64,
    }
}

/// Activity, account age and follower count of the first adopter.
pub fn root_features(window: &CascadeWindow, corpus: &Corpus) -> AdopterFeatures {
    user_features(corpus, window.adopters[0], window.window_end)
}

/// Means of the same quantities over adopters `2..=k`.
pub fn resharer_features(window: &CascadeWindow, corpus: &Corpus) -> AdopterFeatures {
    let resharers = &window.adopters[1..];
    let n = resharers.len() as f64;
    let mut sum = [0.0; 3];
    for &u in resharers {
        for (s, v) in sum.iter_mut().zip(user_features(corpus, u, window.window_end).values()) {
            *s += v;
        }
    }
    AdopterFeatures {
        activity: sum[0] / n,
        age: sum[1] / n,
        popularity: sum[2] / n,
    }
}
