use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::logistic::{Hyperparams, LogisticModel};
use crate::error::{Error, Result};
use crate::features::{Category, FeatureMatrix};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn record(&mut self, truth: u8, predicted: u8) {
        match (truth, predicted) {
            (1, 1) => self.tp += 1,
            (0, 0) => self.tn += 1,
            (0, _) => self.fp += 1,
            _ => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    fn merge(&mut self, other: &Confusion) {
        self.tp += other.tp;
        self.tn += other.tn;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Pooled `(TP + TN) / total` over all evaluated rows.
    pub accuracy: f64,
    pub fold_accuracies: Vec<f64>,
    pub confusion: Confusion,
    pub features: Vec<String>,
}

/// Evaluates `model` on the given rows.
pub fn evaluate(model: &LogisticModel, matrix: &FeatureMatrix, rows: &[usize]) -> Result<Confusion> {
    let predicted = model.predict_rows(matrix, rows)?;
    let mut confusion = Confusion::default();
    for (&r, p) in rows.iter().zip(predicted) {
        confusion.record(matrix.labels()[r], p);
    }
    Ok(confusion)
}

/// Seeded shuffle split into `folds` contiguous blocks; returns the test rows of each fold.
pub fn fold_assignment(rows: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..rows).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    (0..folds)
        .map(|f| order[f * rows / folds..(f + 1) * rows / folds].to_vec())
        .collect()
}

/// k-fold cross-validation; standardization and model are fit on each training split.
pub fn cross_validate(matrix: &FeatureMatrix, folds: usize, seed: u64, hp: &Hyperparams) -> Result<EvalReport> {
    if folds < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {folds}")));
    }
    if folds > matrix.rows() {
        return Err(Error::InvalidArgument(format!(
            "{folds} folds requested for {} rows",
            matrix.rows()
        )));
    }
    let test_sets = fold_assignment(matrix.rows(), folds, seed);
    let per_fold: Vec<Confusion> = test_sets
        .par_iter()
        .map(|test| {
            let mut in_test = vec![false; matrix.rows()];
            test.iter().for_each(|&r| in_test[r] = true);
            let train: Vec<usize> = (0..matrix.rows()).filter(|&r| !in_test[r]).collect();
            let model = LogisticModel::fit(matrix, &train, hp)?;
            evaluate(&model, matrix, test)
        })
        .collect::<Result<_>>()?;
    let mut confusion = Confusion::default();
    per_fold.iter().for_each(|c| confusion.merge(c));
    Ok(EvalReport {
        accuracy: confusion.accuracy(),
        fold_accuracies: per_fold.iter().map(Confusion::accuracy).collect(),
        confusion,
        features: matrix.schema().names().map(str::to_string).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationEntry {
    /// A category name, `all`, or `all-temporal`.
    pub feature_set: String,
    pub report: EvalReport,
}

pub const ALL: &str = "all";
pub const ALL_MINUS_TEMPORAL: &str = "all-temporal";

/// Cross-validated accuracy per requested category, plus all features and all non-temporal features.
pub fn ablation(
    matrix: &FeatureMatrix,
    categories: &[Category],
    folds: usize,
    seed: u64,
    hp: &Hyperparams,
) -> Result<Vec<AblationEntry>> {
    let available = matrix.schema().categories();
    let mut wanted: Vec<Category> = categories.to_vec();
    wanted.sort_unstable();
    wanted.dedup();
    if let Some(c) = wanted.iter().find(|c| !available.contains(c)) {
        return Err(Error::UnknownCategory(c.to_string()));
    }
    let mut sets: Vec<(String, Vec<usize>)> = wanted
        .iter()
        .map(|&c| (c.to_string(), matrix.schema().columns_where(|x| x == c)))
        .collect();
    sets.push((ALL.into(), (0..matrix.cols()).collect()));
    sets.push((ALL_MINUS_TEMPORAL.into(), matrix.schema().columns_where(|c| !c.is_temporal())));
    sets.into_par_iter()
        .map(|(name, cols)| {
            let report = cross_validate(&matrix.select_columns(&cols), folds, seed, hp)?;
            Ok(AblationEntry {
                feature_set: name,
                report,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "0")]
    Zero,
}

impl Sign {
    pub fn of(x: f64) -> Self {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
            Sign::Zero => "0",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScan {
    pub feature: String,
    pub accuracy: f64,
    /// Coefficient of the single-feature model fit on every row (standardized units).
    pub coefficient: f64,
    pub sign: Sign,
}

/// One single-feature model per column: its CV accuracy and full-data coefficient sign.
pub fn single_feature_scan(matrix: &FeatureMatrix, folds: usize, seed: u64, hp: &Hyperparams) -> Result<Vec<FeatureScan>> {
    (0..matrix.cols())
        .into_par_iter()
        .map(|c| {
            let single = matrix.select_columns(&[c]);
            let report = cross_validate(&single, folds, seed, hp)?;
            let model = LogisticModel::fit_all(&single, hp)?;
            Ok(FeatureScan {
                feature: matrix.schema().features()[c].name.clone(),
                accuracy: report.accuracy,
                coefficient: model.weights[0],
                sign: Sign::of(model.weights[0]),
            })
        })
        .collect()
}

/// Accuracy grid: `accuracy[test][train]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    pub datasets: Vec<String>,
    pub features: Vec<String>,
    pub accuracy: Vec<Vec<f64>>,
}

impl TransferMatrix {
    pub fn cell(&self, test: &str, train: &str) -> Option<f64> {
        let i = self.datasets.iter().position(|d| d == test)?;
        let j = self.datasets.iter().position(|d| d == train)?;
        Some(self.accuracy[i][j])
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("test\\train");
        for d in &self.datasets {
            s.push(',');
            s.push_str(d);
        }
        s.push('\n');
        for (i, d) in self.datasets.iter().enumerate() {
            s.push_str(d);
            for a in &self.accuracy[i] {
                s.push_str(&format!(",{a}"));
            }
            s.push('\n');
        }
        s
    }
}

/// Restricts every dataset to the named features (all of the first dataset's when `None`).
fn align<'a>(datasets: &'a [(String, FeatureMatrix)], features: Option<&[String]>) -> Result<(Vec<String>, Vec<FeatureMatrix>)> {
    let Some((_, first)) = datasets.first() else {
        return Err(Error::TooFewDatasets(0));
    };
    let names: Vec<String> = match features {
        Some(f) => f.to_vec(),
        None => first.schema().names().map(str::to_string).collect(),
    };
    let mut out = Vec::with_capacity(datasets.len());
    for (label, m) in datasets {
        let cols = names
            .iter()
            .map(|n| {
                m.schema()
                    .index_of(n)
                    .ok_or_else(|| Error::SchemaMismatch(format!("dataset `{label}` lacks feature `{n}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(m.select_columns(&cols));
    }
    Ok((names, out))
}

/// Train on each dataset, test on each dataset. Diagonal cells are k-fold CV accuracies;
/// off-diagonal cells train on the whole source dataset and test on the whole target.
pub fn transfer_matrix(
    datasets: &[(String, FeatureMatrix)],
    features: Option<&[String]>,
    folds: usize,
    seed: u64,
    hp: &Hyperparams,
) -> Result<TransferMatrix> {
    let (names, aligned) = align(datasets, features)?;
    let models: Vec<LogisticModel> = aligned
        .par_iter()
        .map(|m| LogisticModel::fit_all(m, hp))
        .collect::<Result<_>>()?;
    let n = aligned.len();
    let cells: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (test, train) = (idx / n, idx % n);
            if test == train {
                Ok(cross_validate(&aligned[test], folds, seed, hp)?.accuracy)
            } else {
                let rows: Vec<usize> = (0..aligned[test].rows()).collect();
                Ok(evaluate(&models[train], &aligned[test], &rows)?.accuracy())
            }
        })
        .collect::<Result<_>>()?;
    Ok(TransferMatrix {
        datasets: datasets.iter().map(|(d, _)| d.clone()).collect(),
        features: names,
        accuracy: cells.chunks(n).map(<[f64]>::to_vec).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignRow {
    pub feature: String,
    /// One sign per dataset, in dataset order.
    pub signs: Vec<Sign>,
    pub coefficients: Vec<f64>,
    /// Positive in some dataset and negative in another.
    pub flips: bool,
}

/// Single-feature coefficient signs per dataset for the named features.
pub fn sign_table(
    datasets: &[(String, FeatureMatrix)],
    features: Option<&[String]>,
    hp: &Hyperparams,
) -> Result<Vec<SignRow>> {
    let (names, aligned) = align(datasets, features)?;
    names
        .par_iter()
        .enumerate()
        .map(|(c, name)| {
            let coefficients = aligned
                .iter()
                .map(|m| Ok(LogisticModel::fit_all(&m.select_columns(&[c]), hp)?.weights[0]))
                .collect::<Result<Vec<f64>>>()?;
            let signs: Vec<Sign> = coefficients.iter().map(|&w| Sign::of(w)).collect();
            let flips = signs.contains(&Sign::Positive) && signs.contains(&Sign::Negative);
            Ok(SignRow {
                feature: name.clone(),
                signs,
                coefficients,
                flips,
            })
        })
        .collect()
}
