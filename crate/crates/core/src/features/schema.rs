use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Temporal,
    Ego,
    Subgraph,
    Root,
    Resharer,
    Similarity,
    Daily,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::Temporal,
        Category::Ego,
        Category::Subgraph,
        Category::Root,
        Category::Resharer,
        Category::Similarity,
        Category::Daily,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Temporal => "temporal",
            Category::Ego => "ego",
            Category::Subgraph => "subgraph",
            Category::Root => "root",
            Category::Resharer => "resharer",
            Category::Similarity => "similarity",
            Category::Daily => "daily",
        }
    }

    /// Speed-of-adoption features: `temporal` and, in k-t mode, `daily`.
    pub fn is_temporal(self) -> bool {
        matches!(self, Category::Temporal | Category::Daily)
    }

    /// Category implied by a feature name, as produced by [`FeatureSchema::new`].
    pub fn of_feature(name: &str) -> Option<Category> {
        let indexed = |prefix: &str| {
            name.strip_prefix(prefix)
                .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
        };
        Some(match name {
            "time_first_half" | "time_second_half" => Category::Temporal,
            "reach" | "connections" => Category::Ego,
            "indegree_sub" | "density_sub" | "cc_sub" | "dist_sub" => Category::Subgraph,
            "activity_root" | "age_root" | "popularity_root" => Category::Root,
            "activity_resharer" | "age_resharer" | "popularity_resharer" => Category::Resharer,
            "sim_count" | "sim_mean" | "sim_med" | "sim_max" => Category::Similarity,
            _ if indexed("time_") => Category::Temporal,
            _ if indexed("in_") => Category::Ego,
            _ if indexed("sub_in_") => Category::Subgraph,
            _ if indexed("adoptions_") => Category::Daily,
            _ => return None,
        })
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownCategory(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub category: Category,
}

/// Ordered feature names with their categories.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureSchema {
    features: Vec<FeatureSpec>,
}

impl FeatureSchema {
    /// The schema for peek size `k`; `daily_days = Some(t)` appends `adoptions_1..adoptions_t`.
    pub fn new(k: usize, daily_days: Option<u32>) -> Self {
        let mut f = Vec::new();
        let mut push = |name: String, category| f.push(FeatureSpec { name, category });
        for i in 2..=k {
            push(format!("time_{i}"), Category::Temporal);
        }
        push("time_first_half".into(), Category::Temporal);
        push("time_second_half".into(), Category::Temporal);
        for i in 2..=k {
            push(format!("in_{i}"), Category::Ego);
        }
        push("reach".into(), Category::Ego);
        push("connections".into(), Category::Ego);
        for name in ["indegree_sub", "density_sub", "cc_sub", "dist_sub"] {
            push(name.into(), Category::Subgraph);
        }
        for i in 1..=k {
            push(format!("sub_in_{i}"), Category::Subgraph);
        }
        for name in ["activity_root", "age_root", "popularity_root"] {
            push(name.into(), Category::Root);
        }
        for name in ["activity_resharer", "age_resharer", "popularity_resharer"] {
            push(name.into(), Category::Resharer);
        }
        for name in ["sim_count", "sim_mean", "sim_med", "sim_max"] {
            push(name.into(), Category::Similarity);
        }
        for i in 1..=daily_days.unwrap_or(0) {
            push(format!("adoptions_{i}"), Category::Daily);
        }
        Self { features: f }
    }

    /// Rebuilds a schema from feature names, inferring categories.
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let features = names
            .iter()
            .map(|n| {
                let name = n.as_ref();
                Category::of_feature(name)
                    .map(|category| FeatureSpec {
                        name: name.to_string(),
                        category,
                    })
                    .ok_or_else(|| Error::SchemaMismatch(format!("unrecognised feature `{name}`")))
            })
            .collect::<Result<_>>()?;
        Ok(Self { features })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[FeatureSpec] {
        &self.features
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|f| f.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn category(&self, col: usize) -> Category {
        self.features[col].category
    }

    /// Categories present, in canonical order.
    pub fn categories(&self) -> Vec<Category> {
        let mut cats: Vec<Category> = self.features.iter().map(|f| f.category).collect();
        cats.sort_unstable();
        cats.dedup();
        cats
    }

    pub fn columns_where(&self, pred: impl Fn(Category) -> bool) -> Vec<usize> {
        (0..self.len()).filter(|&c| pred(self.category(c))).collect()
    }

    pub fn subset(&self, columns: &[usize]) -> Self {
        Self {
            features: columns.iter().map(|&c| self.features[c].clone()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(s: &FeatureSchema, c: Category) -> usize {
        s.columns_where(|x| x == c).len()
    }

    #[test]
    fn k5_fixed_schema_counts() {
        let s = FeatureSchema::new(5, None);
        assert_eq!(s.len(), 31);
        assert_eq!(count(&s, Category::Temporal), 6);
        assert_eq!(count(&s, Category::Ego), 6);
        assert_eq!(count(&s, Category::Subgraph), 9);
        assert_eq!(count(&s, Category::Root), 3);
        assert_eq!(count(&s, Category::Resharer), 3);
        assert_eq!(count(&s, Category::Similarity), 4);
        assert_eq!(s.columns_where(|c| !c.is_temporal()).len(), 25);
    }

    #[test]
    fn kt_appends_daily() {
        let s = FeatureSchema::new(5, Some(7));
        assert_eq!(s.len(), 38);
        assert_eq!(s.names().last(), Some("adoptions_7"));
        assert_eq!(s.columns_where(|c| !c.is_temporal()).len(), 25);
    }

    #[test]
    fn names_round_trip_through_inference() {
        for (k, t) in [(5, None), (3, Some(2)), (12, Some(15))] {
            let s = FeatureSchema::new(k, t);
            let names: Vec<&str> = s.names().collect();
            assert_eq!(FeatureSchema::from_names(&names).unwrap(), s);
        }
        assert!(FeatureSchema::from_names(&["time_"]).is_err());
        assert!(FeatureSchema::from_names(&["bogus"]).is_err());
    }

    #[test]
    fn category_parse() {
        assert_eq!("ego".parse::<Category>().unwrap(), Category::Ego);
        assert!(matches!("nope".parse::<Category>(), Err(Error::UnknownCategory(_))));
    }
}
