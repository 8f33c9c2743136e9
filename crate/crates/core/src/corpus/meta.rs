use std::path::Path;

use super::graph::{data_lines, parse_fields};
use super::log::{AdoptionLog, Timestamp, UserId};
use crate::error::{Error, Result};

/// Optional registration times, keyed by the adoption log's user ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserMeta {
    registration: Vec<Option<Timestamp>>,
}

impl UserMeta {
    /// Builds the table, clamping any registration later than the user's first adoption.
    pub fn new(log: &AdoptionLog, entries: impl IntoIterator<Item = (UserId, Timestamp)>) -> Self {
        let mut registration = vec![None; log.user_count()];
        let mut clamped = 0usize;
        for (user, mut t) in entries {
            let Some(slot) = registration.get_mut(user.0 as usize) else {
                continue;
            };
            if let Some(first) = log.first_adoption(user) {
                if t > first {
                    log::debug!("user {}: registration {t} after first adoption {first}", log.users().name(user.0));
                    clamped += 1;
                    t = first;
                }
            }
            *slot = Some(t);
        }
        if clamped > 0 {
            log::warn!("{clamped} registration times after first adoption were clamped");
        }
        Self { registration }
    }

    pub fn registration(&self, user: UserId) -> Option<Timestamp> {
        self.registration.get(user.0 as usize).copied().flatten()
    }
}

/// Loads a `user \t unix_seconds` registration table. Users absent from the log are ignored.
pub fn load_meta(path: impl AsRef<Path>, log: &AdoptionLog) -> Result<UserMeta> {
    let path = path.as_ref();
    let mut entries = Vec::new();
    for (lineno, line) in data_lines(path)? {
        let f = parse_fields(path, lineno, &line, 2)?;
        let t: Timestamp = f[1]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("timestamp `{}` is not a non-negative integer", f[1])))?;
        if let Some(u) = log.user(f[0]) {
            entries.push((u, t));
        }
    }
    Ok(UserMeta::new(log, entries))
}
