//! Early-adoption features.
//!
//! Every window gets the same fixed schema: temporal speed, ego-network and
//! induced-subgraph structure, root and resharer attributes, pairwise
//! preference similarity, and (k-t cohorts only) per-day adoption counts.

mod adopters;
mod schema;
mod similarity;
mod structural;
mod temporal;

use std::path::Path;

use rayon::prelude::*;

pub use self::adopters::{resharer_features, root_features, AdopterFeatures, ACTIVITY_WINDOW_DAYS};
pub use self::schema::{Category, FeatureSchema, FeatureSpec};
pub use self::similarity::{jaccard, similarity_features, SimilarityFeatures, MIN_HISTORY};
pub use self::structural::{ego_structural_features, subgraph_structural_features, EgoFeatures, SubgraphFeatures};
pub use self::temporal::{daily_adoption_features, temporal_features, TemporalFeatures};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::windows::{CascadeWindow, Cohort, Formulation};

/// Row-major feature values with a missing mask and binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    schema: FeatureSchema,
    values: Vec<f64>,
    missing: Vec<bool>,
    labels: Vec<u8>,
}

impl FeatureMatrix {
    pub fn new(schema: FeatureSchema, values: Vec<f64>, missing: Vec<bool>, labels: Vec<u8>) -> Result<Self> {
        let cols = schema.len();
        if values.len() != labels.len() * cols || missing.len() != values.len() {
            return Err(Error::SchemaMismatch(format!(
                "{} values / {} mask entries for {} rows × {cols} columns",
                values.len(),
                missing.len(),
                labels.len()
            )));
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::InvalidArgument("labels must be 0 or 1".into()));
        }
        Ok(Self {
            schema,
            values,
            missing,
            labels,
        })
    }

    /// Dense matrix with nothing missing.
    pub fn from_rows(schema: FeatureSchema, rows: &[Vec<f64>], labels: Vec<u8>) -> Result<Self> {
        let values: Vec<f64> = rows.iter().flatten().copied().collect();
        let missing = vec![false; values.len()];
        Self::new(schema, values, missing, labels)
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn cols(&self) -> usize {
        self.schema.len()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let c = self.cols();
        &self.values[r * c..(r + 1) * c]
    }

    pub fn missing_row(&self, r: usize) -> &[bool] {
        let c = self.cols();
        &self.missing[r * c..(r + 1) * c]
    }

    pub fn value(&self, r: usize, c: usize) -> Option<f64> {
        let i = r * self.cols() + c;
        (!self.missing[i]).then(|| self.values[i])
    }

    pub fn column(&self, c: usize) -> Vec<Option<f64>> {
        (0..self.rows()).map(|r| self.value(r, c)).collect()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Keeps the given columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Self {
        let cols = self.cols();
        let mut values = Vec::with_capacity(self.rows() * columns.len());
        let mut missing = Vec::with_capacity(values.capacity());
        for r in 0..self.rows() {
            for &c in columns {
                values.push(self.values[r * cols + c]);
                missing.push(self.missing[r * cols + c]);
            }
        }
        Self {
            schema: self.schema.subset(columns),
            values,
            missing,
            labels: self.labels.clone(),
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut values = Vec::with_capacity(rows.len() * self.cols());
        let mut missing = Vec::with_capacity(values.capacity());
        for &r in rows {
            values.extend_from_slice(self.row(r));
            missing.extend_from_slice(self.missing_row(r));
        }
        Self {
            schema: self.schema.clone(),
            values,
            missing,
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
        }
    }

    pub fn select_categories(&self, categories: &[Category]) -> Self {
        self.select_columns(&self.schema.columns_where(|c| categories.contains(&c)))
    }

    /// Header is the feature names followed by `label`; missing cells are empty.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(self.schema.names().chain(["label"]))?;
        let mut record: Vec<String> = Vec::with_capacity(self.cols() + 1);
        for r in 0..self.rows() {
            record.clear();
            for c in 0..self.cols() {
                record.push(self.value(r, c).map_or_else(String::new, |v| v.to_string()));
            }
            record.push(self.labels[r].to_string());
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut rd = csv::Reader::from_path(path)?;
        let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
        match header.last() {
            Some(l) if l == "label" => {}
            _ => return Err(Error::parse(path, 1, "last column must be `label`")),
        }
        let schema = FeatureSchema::from_names(&header[..header.len() - 1])?;
        let (mut values, mut missing, mut labels) = (Vec::new(), Vec::new(), Vec::new());
        for (i, rec) in rd.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            if rec.len() != header.len() {
                return Err(Error::parse(path, line, format!("expected {} cells, got {}", header.len(), rec.len())));
            }
            for cell in rec.iter().take(schema.len()) {
                if cell.is_empty() {
                    values.push(0.0);
                    missing.push(true);
                } else {
                    let v: f64 = cell
                        .parse()
                        .map_err(|_| Error::parse(path, line, format!("bad number `{cell}`")))?;
                    values.push(v);
                    missing.push(false);
                }
            }
            let label = match &rec[schema.len()] {
                "0" => 0,
                "1" => 1,
                other => return Err(Error::parse(path, line, format!("bad label `{other}`"))),
            };
            labels.push(label);
        }
        Self::new(schema, values, missing, labels)
    }
}

/// Full feature row for one window, aligned with `FeatureSchema::new(k, daily_days)`.
pub fn featurize_window(window: &CascadeWindow, corpus: &Corpus, daily_days: Option<u32>) -> (Vec<f64>, Vec<bool>) {
    let nodes: Vec<Option<u32>> = window.adopters.iter().map(|&u| corpus.node(u)).collect();
    let mut values = Vec::with_capacity(32);
    let mut missing = Vec::with_capacity(32);
    let mut put = |v: Option<f64>| {
        values.push(v.unwrap_or(0.0));
        missing.push(v.is_none());
    };

    temporal_features(window).values().for_each(|v| put(Some(v)));

    let ego = ego_structural_features(&nodes, &corpus.graph);
    ego.in_degree.iter().for_each(|&v| put(Some(v as f64)));
    put(Some(ego.reach as f64));
    put(Some(ego.connections as f64));

    let sub = subgraph_structural_features(&nodes, &corpus.graph);
    put(Some(sub.indegree_sub));
    put(Some(sub.density_sub as f64));
    put(Some(sub.cc_sub as f64));
    put(sub.dist_sub);
    sub.sub_in.iter().for_each(|&v| put(Some(v as f64)));

    root_features(window, corpus).values().into_iter().for_each(|v| put(Some(v)));
    resharer_features(window, corpus).values().into_iter().for_each(|v| put(Some(v)));

    let sim = similarity_features(window, &corpus.log);
    put(Some(sim.count as f64));
    let (mean, med, max) = sim.summary.unzip3();
    put(mean);
    put(med);
    put(max);

    if let Some(t) = daily_days {
        daily_adoption_features(window, t).into_iter().for_each(|v| put(Some(v)));
    }
    (values, missing)
}

trait Unzip3 {
    fn unzip3(self) -> (Option<f64>, Option<f64>, Option<f64>);
}

impl Unzip3 for Option<(f64, f64, f64)> {
    fn unzip3(self) -> (Option<f64>, Option<f64>, Option<f64>) {
        match self {
            Some((a, b, c)) => (Some(a), Some(b), Some(c)),
            None => (None, None, None),
        }
    }
}

/// Schema for a cohort: daily counts are appended for k-t cohorts.
pub fn cohort_schema(cohort: &Cohort) -> FeatureSchema {
    FeatureSchema::new(cohort.spec.k, daily_days(cohort))
}

fn daily_days(cohort: &Cohort) -> Option<u32> {
    match cohort.spec.formulation {
        Formulation::FixedK => None,
        Formulation::KT => cohort.spec.match_days,
    }
}

/// Feature matrix for every window of the cohort, in cohort order.
pub fn featurize_cohort(cohort: &Cohort, corpus: &Corpus) -> Result<FeatureMatrix> {
    if cohort.is_empty() {
        return Err(Error::CohortTooSmall(0));
    }
    let schema = cohort_schema(cohort);
    let daily = daily_days(cohort);
    let rows: Vec<(Vec<f64>, Vec<bool>)> = cohort
        .windows
        .par_iter()
        .map(|w| featurize_window(w, corpus, daily))
        .collect();
    let mut values = Vec::with_capacity(rows.len() * schema.len());
    let mut missing = Vec::with_capacity(values.capacity());
    for (v, m) in rows {
        debug_assert_eq!(v.len(), schema.len());
        values.extend(v);
        missing.extend(m);
    }
    FeatureMatrix::new(schema, values, missing, cohort.labels())
}

/// Like [`featurize_cohort`] restricted to `categories`; asking for daily counts on a
/// fixed-k cohort is a schema mismatch.
pub fn featurize_categories(cohort: &Cohort, corpus: &Corpus, categories: &[Category]) -> Result<FeatureMatrix> {
    let available = cohort_schema(cohort).categories();
    if let Some(c) = categories.iter().find(|c| !available.contains(c)) {
        return Err(Error::SchemaMismatch(format!(
            "category `{c}` is not available for {:?} cohorts",
            cohort.spec.formulation
        )));
    }
    Ok(featurize_cohort(cohort, corpus)?.select_categories(categories))
}
