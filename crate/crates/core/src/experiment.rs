//! End-to-end runs driven by a TOML config.
//!
//! ```toml
//! seed = 42
//! out = "runs/default"
//! folds = 5
//! categories = ["temporal", "ego", "subgraph", "root", "resharer", "similarity"]
//!
//! [dataset]
//! synth = "default"          # or: adoptions / graph / directed / meta
//!
//! [cohort]
//! formulation = "fixed_k"    # or "kt"; `match_days` omitted means the fixed-k median time to k
//! k = 5
//! horizon_days = 28
//!
//! [learner]
//! learning_rate = 0.1
//! l2 = 1e-4
//! max_epochs = 5000
//! tolerance = 1e-6
//! ```
//!
//! Every output file is a pure function of the config and its inputs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{AdoptionLog, Corpus};
use crate::error::{Error, Result};
use crate::features::{featurize_cohort, Category, FeatureMatrix};
use crate::learner::{
    ablation, sign_table, single_feature_scan, transfer_matrix, AblationEntry, FeatureScan, Hyperparams, SignRow,
    TransferMatrix, DEFAULT_FOLDS,
};
use crate::synth::{generate, SynthConfig};
use crate::windows::{build_cohort, build_fixed_k_cohort, Cohort, CohortSpec, Formulation};

/// Where a dataset comes from: a synth profile or TSV files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    /// Label used in transfer reports; defaults to the profile name or the adoptions file stem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adoptions: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    #[serde(default = "yes")]
    pub directed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<PathBuf>,
}

fn yes() -> bool {
    true
}

impl DatasetConfig {
    pub fn synth(profile: &str) -> Self {
        Self {
            name: None,
            synth: Some(profile.to_string()),
            adoptions: None,
            graph: None,
            directed: true,
            meta: None,
        }
    }

    pub fn files(adoptions: impl Into<PathBuf>, graph: impl Into<PathBuf>, directed: bool) -> Self {
        Self {
            name: None,
            synth: None,
            adoptions: Some(adoptions.into()),
            graph: Some(graph.into()),
            directed,
            meta: None,
        }
    }

    pub fn label(&self) -> String {
        if let Some(n) = &self.name {
            return n.clone();
        }
        if let Some(p) = &self.synth {
            return p.clone();
        }
        self.adoptions
            .as_deref()
            .and_then(Path::file_stem)
            .map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned())
    }

    /// Generates or loads the corpus; synth datasets take their seed from `seed`.
    pub fn load(&self, seed: u64) -> Result<Corpus> {
        match (&self.synth, &self.adoptions, &self.graph) {
            (Some(profile), None, None) => {
                let cfg = SynthConfig {
                    seed,
                    ..SynthConfig::profile(profile)?
                };
                let (graph, log) = generate(&cfg)?;
                Ok(Corpus::new(log, graph, None))
            }
            (None, Some(a), Some(g)) => Corpus::load(a, g, self.directed, self.meta.as_deref()),
            _ => Err(Error::InvalidArgument(
                "a dataset needs either `synth` or both `adoptions` and `graph`".into(),
            )),
        }
    }
}

fn default_seed() -> u64 {
    42
}

fn default_folds() -> usize {
    DEFAULT_FOLDS
}

fn default_cohort() -> CohortSpec {
    CohortSpec::fixed_k(5, 28)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub out: PathBuf,
    #[serde(default = "default_folds")]
    pub folds: usize,
    /// Ablation categories; empty means every category in the cohort's schema.
    #[serde(default)]
    pub categories: Vec<Category>,
    pub dataset: DatasetConfig,
    #[serde(default = "default_cohort")]
    pub cohort: CohortSpec,
    #[serde(default)]
    pub learner: Hyperparams,
}

impl ExperimentConfig {
    pub fn new(dataset: DatasetConfig, cohort: CohortSpec, out: impl Into<PathBuf>) -> Self {
        Self {
            seed: default_seed(),
            out: out.into(),
            folds: DEFAULT_FOLDS,
            categories: Vec::new(),
            dataset,
            cohort,
            learner: Hyperparams::default(),
        }
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        Ok(toml::from_str(s)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_toml(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}

/// Everything a run measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub dataset: String,
    pub seed: u64,
    pub cohort: CohortSpec,
    pub cohort_size: usize,
    pub median_popularity: f64,
    pub median_time_to_k_days: f64,
    pub positives: usize,
    pub schema_size: usize,
    /// Cross-validated accuracy per feature set, in ablation order.
    pub accuracies: Vec<(String, f64)>,
    pub ablation: Vec<AblationEntry>,
    pub scan: Vec<FeatureScan>,
}

impl ExperimentSummary {
    pub fn accuracy(&self, feature_set: &str) -> Option<f64> {
        self.accuracies.iter().find(|(n, _)| n == feature_set).map(|&(_, a)| a)
    }

    pub fn scan_accuracy(&self, feature: &str) -> Option<f64> {
        self.scan.iter().find(|s| s.feature == feature).map(|s| s.accuracy)
    }
}

/// The cohort an experiment asks for. A k-t spec without `match_days` takes the
/// ceiling of the fixed-k cohort's median time to k, in days.
pub fn resolve_cohort(log: &AdoptionLog, spec: CohortSpec) -> Result<Cohort> {
    let spec = match (spec.formulation, spec.match_days) {
        (Formulation::KT, None) => {
            let fixed = build_fixed_k_cohort(log, CohortSpec::fixed_k(spec.k, spec.horizon_days))?;
            let t = (fixed.median_time_to_k().ceil() as u32).clamp(1, spec.horizon_days);
            log::info!("k-t matching window t = {t} days");
            CohortSpec::kt(spec.k, spec.horizon_days, t)
        }
        _ => spec,
    };
    build_cohort(log, spec)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: PathBuf, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

pub fn ablation_csv(entries: &[AblationEntry]) -> String {
    let mut s = String::from("feature_set,columns,accuracy\n");
    for e in entries {
        s.push_str(&format!("{},{},{}\n", e.feature_set, e.report.features.len(), e.report.accuracy));
    }
    s
}

pub fn scan_csv(scan: &[FeatureScan]) -> String {
    let mut s = String::from("feature,accuracy,coefficient,sign\n");
    for f in scan {
        s.push_str(&format!("{},{},{},{}\n", f.feature, f.accuracy, f.coefficient, f.sign.as_str()));
    }
    s
}

pub fn sign_csv(datasets: &[String], rows: &[SignRow]) -> String {
    let mut s = String::from("feature");
    for d in datasets {
        s.push_str(&format!(",{d}_sign,{d}_coefficient"));
    }
    s.push_str(",flips\n");
    for r in rows {
        s.push_str(&r.feature);
        for (sign, c) in r.signs.iter().zip(&r.coefficients) {
            s.push_str(&format!(",{},{c}", sign.as_str()));
        }
        s.push_str(&format!(",{}\n", r.flips));
    }
    s
}

/// Cohort, features, ablation and single-feature scan for one dataset.
///
/// Writes `config.toml`, `cohort.jsonl`, `features.csv`, `ablation.json`,
/// `ablation.csv`, `scan.csv` and `summary.json` under `config.out`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    let out = &config.out;
    create_dir(out).map_err(|e| e.in_stage("output"))?;
    write(out.join("config.toml"), config.to_toml()?).map_err(|e| e.in_stage("output"))?;

    let corpus = config.dataset.load(config.seed).map_err(|e| e.in_stage("ingest"))?;
    let cohort = resolve_cohort(&corpus.log, config.cohort).map_err(|e| e.in_stage("cohort"))?;
    cohort
        .write_jsonl(&corpus.log, out.join("cohort.jsonl"))
        .map_err(|e| e.in_stage("cohort"))?;

    let matrix = featurize_cohort(&cohort, &corpus).map_err(|e| e.in_stage("featurize"))?;
    matrix.write_csv(out.join("features.csv")).map_err(|e| e.in_stage("featurize"))?;

    let categories = if config.categories.is_empty() {
        matrix.schema().categories()
    } else {
        config.categories.clone()
    };
    let entries = ablation(&matrix, &categories, config.folds, config.seed, &config.learner)
        .map_err(|e| e.in_stage("ablate"))?;
    write(out.join("ablation.json"), serde_json::to_string_pretty(&entries)?).map_err(|e| e.in_stage("ablate"))?;
    write(out.join("ablation.csv"), ablation_csv(&entries)).map_err(|e| e.in_stage("ablate"))?;

    let scan = single_feature_scan(&matrix, config.folds, config.seed, &config.learner)
        .map_err(|e| e.in_stage("scan"))?;
    write(out.join("scan.csv"), scan_csv(&scan)).map_err(|e| e.in_stage("scan"))?;

    let summary = ExperimentSummary {
        dataset: config.dataset.label(),
        seed: config.seed,
        cohort: cohort.spec,
        cohort_size: cohort.len(),
        median_popularity: cohort.median_popularity,
        median_time_to_k_days: cohort.median_time_to_k(),
        positives: matrix.labels().iter().filter(|&&l| l == 1).count(),
        schema_size: matrix.cols(),
        accuracies: entries.iter().map(|e| (e.feature_set.clone(), e.report.accuracy)).collect(),
        ablation: entries,
        scan,
    };
    write(out.join("summary.json"), serde_json::to_string_pretty(&summary)?).map_err(|e| e.in_stage("report"))?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub out: PathBuf,
    #[serde(default = "default_folds")]
    pub folds: usize,
    pub datasets: Vec<DatasetConfig>,
    #[serde(default = "default_cohort")]
    pub cohort: CohortSpec,
    #[serde(default)]
    pub learner: Hyperparams,
}

impl TransferConfig {
    pub fn new(datasets: Vec<DatasetConfig>, out: impl Into<PathBuf>) -> Self {
        Self {
            seed: default_seed(),
            out: out.into(),
            folds: DEFAULT_FOLDS,
            datasets,
            cohort: default_cohort(),
            learner: Hyperparams::default(),
        }
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        Ok(toml::from_str(s)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_toml(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub temporal: TransferMatrix,
    pub non_temporal: TransferMatrix,
    pub signs: Vec<SignRow>,
}

impl TransferReport {
    /// Largest drop from a diagonal cell to an off-diagonal cell in the same test row.
    pub fn max_drop(matrix: &TransferMatrix) -> f64 {
        let n = matrix.datasets.len();
        let mut worst = f64::NEG_INFINITY;
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                worst = worst.max(matrix.accuracy[i][i] - matrix.accuracy[i][j]);
            }
        }
        worst
    }
}

/// Temporal-only and non-temporal-only transfer matrices from labelled feature matrices.
pub fn transfer_report(
    datasets: &[(String, FeatureMatrix)],
    folds: usize,
    seed: u64,
    hp: &Hyperparams,
) -> Result<TransferReport> {
    if datasets.len() < 2 {
        return Err(Error::TooFewDatasets(datasets.len()));
    }
    let schema = datasets[0].1.schema();
    let names_where = |temporal: bool| -> Vec<String> {
        schema
            .features()
            .iter()
            .filter(|f| f.category.is_temporal() == temporal)
            .map(|f| f.name.clone())
            .collect()
    };
    let (temporal, non_temporal) = (names_where(true), names_where(false));
    Ok(TransferReport {
        temporal: transfer_matrix(datasets, Some(&temporal), folds, seed, hp)?,
        non_temporal: transfer_matrix(datasets, Some(&non_temporal), folds, seed, hp)?,
        signs: sign_table(datasets, Some(&non_temporal), hp)?,
    })
}

/// Writes `transfer_temporal.csv`, `transfer_non_temporal.csv`, `signs.csv` and `transfer.json`.
pub fn write_transfer_report(report: &TransferReport, out: &Path) -> Result<()> {
    create_dir(out)?;
    write(out.join("transfer_temporal.csv"), report.temporal.to_csv())?;
    write(out.join("transfer_non_temporal.csv"), report.non_temporal.to_csv())?;
    write(out.join("signs.csv"), sign_csv(&report.temporal.datasets, &report.signs))?;
    write(out.join("transfer.json"), serde_json::to_string_pretty(report)?)
}

/// Builds a cohort per dataset, featurizes it, and writes the transfer report.
pub fn run_transfer(config: &TransferConfig) -> Result<TransferReport> {
    if config.datasets.len() < 2 {
        return Err(Error::TooFewDatasets(config.datasets.len()).in_stage("transfer"));
    }
    create_dir(&config.out).map_err(|e| e.in_stage("output"))?;
    write(config.out.join("config.toml"), config.to_toml()?).map_err(|e| e.in_stage("output"))?;
    let mut matrices = Vec::with_capacity(config.datasets.len());
    for d in &config.datasets {
        let corpus = d.load(config.seed).map_err(|e| e.in_stage("ingest"))?;
        let cohort = resolve_cohort(&corpus.log, config.cohort).map_err(|e| e.in_stage("cohort"))?;
        log::info!(
            "{}: {} items, median time to k {:.2} days",
            d.label(),
            cohort.len(),
            cohort.median_time_to_k()
        );
        let matrix = featurize_cohort(&cohort, &corpus).map_err(|e| e.in_stage("featurize"))?;
        matrices.push((d.label(), matrix));
    }
    let report =
        transfer_report(&matrices, config.folds, config.seed, &config.learner).map_err(|e| e.in_stage("transfer"))?;
    write_transfer_report(&report, &config.out).map_err(|e| e.in_stage("report"))?;
    Ok(report)
}
