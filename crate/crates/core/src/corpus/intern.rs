use std::collections::HashMap;

/// Bidirectional mapping between external string ids and dense integer ids.
///
/// Ids are assigned in canonical order of the names (numeric order when every
/// name parses as an unsigned integer, lexicographic otherwise), so the
/// integer ids never depend on input line order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interner {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl Interner {
    /// Builds a canonical interner from an arbitrary collection of names.
    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names: Vec<String> = names.into_iter().map(Into::into).collect();
        let numeric: Option<Vec<u64>> = names.iter().map(|n| n.parse::<u64>().ok()).collect();
        match numeric {
            Some(_) => names.sort_by_cached_key(|n| (n.parse::<u64>().unwrap_or(u64::MAX), n.clone())),
            None => names.sort(),
        }
        names.dedup();
        Self::from_ordered(names)
    }

    /// Keeps the given order; names must be unique.
    pub fn from_ordered(names: Vec<String>) -> Self {
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect();
        Self { names, index }
    }

    /// `0..n` rendered as decimal strings.
    pub fn sequential(n: usize) -> Self {
        Self::from_ordered((0..n).map(|i| i.to_string()).collect())
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_names_sort_numerically() {
        let i = Interner::from_names(["10", "9", "100", "9"]);
        assert_eq!(i.names(), ["9", "10", "100"]);
        assert_eq!(i.get("10"), Some(1));
    }

    #[test]
    fn mixed_names_sort_lexicographically() {
        let i = Interner::from_names(["u10", "u9", "7"]);
        assert_eq!(i.names(), ["7", "u10", "u9"]);
        assert_eq!(i.get("missing"), None);
    }
}
