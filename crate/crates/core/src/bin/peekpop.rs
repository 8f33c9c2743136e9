use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use peekpop::corpus::{load_adoptions, Corpus};
use peekpop::experiment::{
    ablation_csv, resolve_cohort, run_experiment, run_transfer, scan_csv, transfer_report, write_transfer_report,
    ExperimentConfig, TransferConfig, TransferReport,
};
use peekpop::features::{featurize_cohort, Category, FeatureMatrix};
use peekpop::learner::{ablation, cross_validate, evaluate, single_feature_scan, Hyperparams, LogisticModel};
use peekpop::synth::{generate, top_share, write_dataset, SynthConfig};
use peekpop::windows::{CohortSpec, Formulation};
use peekpop::{Error, Result};

/// Peeking-based popularity prediction for information cascades.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// Random seed for synthesis and fold shuffling [default: 42, or the config file's seed].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output directory [default: out, or the config file's `out`].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic follow graph and adoption log.
    Synth(SynthArgs),
    /// Build a prediction cohort and write it as JSON lines.
    Cohort {
        #[arg(long)]
        adoptions: PathBuf,
        #[command(flatten)]
        cohort: CohortArgs,
    },
    /// Build a cohort and write its feature matrix as CSV.
    Featurize {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        cohort: CohortArgs,
    },
    /// Fit a model on every row of a feature CSV.
    Train {
        #[command(flatten)]
        features: FeatureArgs,
        #[command(flatten)]
        learner: LearnerArgs,
    },
    /// Score a saved model on a feature CSV, or cross-validate when no model is given.
    Eval {
        #[command(flatten)]
        features: FeatureArgs,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[command(flatten)]
        learner: LearnerArgs,
    },
    /// Cross-validated accuracy per feature category, all features, and all non-temporal features.
    Ablate {
        #[command(flatten)]
        features: FeatureArgs,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[command(flatten)]
        learner: LearnerArgs,
    },
    /// Single-feature accuracy and coefficient sign for every column.
    Scan {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[command(flatten)]
        learner: LearnerArgs,
    },
    /// Cross-dataset transfer matrices and coefficient signs.
    Transfer {
        /// Transfer config (TOML) listing the datasets.
        #[arg(long, conflicts_with = "dataset")]
        config: Option<PathBuf>,
        /// Labelled feature CSV as NAME=PATH; repeat for each dataset.
        #[arg(long = "dataset", value_name = "NAME=PATH")]
        dataset: Vec<String>,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[command(flatten)]
        learner: LearnerArgs,
    },
    /// Run a full experiment from a config file.
    Report {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct SynthArgs {
    /// Preset: default, fast or slow.
    #[arg(long, default_value = "default")]
    profile: String,
    /// TOML file with SynthConfig keys; replaces the profile.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Users in the follow graph [default profile: 20000].
    #[arg(long)]
    n_users: Option<usize>,
    /// Follow edges per arriving user [default profile: 8].
    #[arg(long)]
    attach_m: Option<usize>,
    /// Items to simulate [default profile: 50000; fast/slow: 20000].
    #[arg(long)]
    n_items: Option<usize>,
    /// Days of simulated activity [default profile: 60].
    #[arg(long)]
    horizon_days: Option<u32>,
    /// Log-normal shape of item quality [default profile: 1.0].
    #[arg(long)]
    quality_sigma: Option<f64>,
    /// Per-day adoption hazard for exposed users [default: 0.02; fast: 0.9; slow: 0.08].
    #[arg(long)]
    p0: Option<f64>,
    /// Cumulative-advantage strength [default profile: 0.5].
    #[arg(long)]
    alpha: Option<f64>,
    /// Per-day out-of-network hazard [default: 1e-5; fast: 1e-7; slow: 1e-6].
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormulationArg {
    FixedK,
    Kt,
}

#[derive(Args)]
struct CohortArgs {
    #[arg(long, value_enum, default_value = "fixed-k")]
    formulation: FormulationArg,
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Popularity horizon T in days.
    #[arg(long, default_value_t = 28)]
    horizon_days: u32,
    /// Matching window t for k-t cohorts [default: ceiling of the fixed-k median time to k].
    #[arg(long)]
    match_days: Option<u32>,
}

impl CohortArgs {
    fn spec(&self) -> CohortSpec {
        CohortSpec {
            k: self.k,
            horizon_days: self.horizon_days,
            match_days: self.match_days,
            formulation: match self.formulation {
                FormulationArg::FixedK => Formulation::FixedK,
                FormulationArg::Kt => Formulation::KT,
            },
        }
    }
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    adoptions: PathBuf,
    #[arg(long)]
    graph: PathBuf,
    /// Treat graph lines as friendships.
    #[arg(long)]
    undirected: bool,
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Args)]
struct FeatureArgs {
    /// Labelled feature CSV from `featurize`.
    #[arg(long)]
    features: PathBuf,
    /// Restrict to these categories (comma separated) [default: all].
    #[arg(long, value_delimiter = ',')]
    categories: Vec<Category>,
}

impl FeatureArgs {
    fn load(&self) -> Result<FeatureMatrix> {
        let m = FeatureMatrix::read_csv(&self.features)?;
        if self.categories.is_empty() {
            return Ok(m);
        }
        let available = m.schema().categories();
        if let Some(c) = self.categories.iter().find(|c| !available.contains(c)) {
            return Err(Error::UnknownCategory(c.to_string()));
        }
        Ok(m.select_categories(&self.categories))
    }
}

#[derive(Args)]
struct LearnerArgs {
    #[arg(long, default_value_t = 0.1)]
    learning_rate: f64,
    #[arg(long, default_value_t = 1e-4)]
    l2: f64,
    #[arg(long, default_value_t = 5000)]
    max_epochs: usize,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
}

impl LearnerArgs {
    fn hyperparams(&self) -> Hyperparams {
        Hyperparams {
            learning_rate: self.learning_rate,
            l2: self.l2,
            max_epochs: self.max_epochs,
            tolerance: self.tolerance,
        }
    }
}

const DEFAULT_SEED: u64 = 42;

fn out_dir(cli_out: &Option<PathBuf>) -> Result<PathBuf> {
    let dir = cli_out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir).map_err(|e| Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    Ok(dir)
}

fn write(path: PathBuf, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(&path, contents).map_err(|e| Error::Io { path, source: e })
}

fn synth(args: &SynthArgs, seed: Option<u64>, out: &Path) -> Result<()> {
    let mut cfg = match &args.config {
        Some(p) => SynthConfig::from_toml(&fs::read_to_string(p).map_err(|e| Error::Io {
            path: p.clone(),
            source: e,
        })?)?,
        None => SynthConfig::profile(&args.profile)?,
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    macro_rules! set {
        ($($f:ident),*) => { $(if let Some(v) = args.$f { cfg.$f = v; })* };
    }
    set!(n_users, attach_m, n_items, horizon_days, quality_sigma, p0, alpha, epsilon);
    let (graph, log) = generate(&cfg)?;
    write_dataset(out, &cfg, &graph, &log)?;
    let pop = log.item_popularity();
    println!(
        "{} users, {} follow edges, {} adoptions; top 20% of items hold {:.3} of adoptions",
        cfg.n_users,
        graph.edge_count(),
        log.len(),
        top_share(&pop, 0.2)
    );
    Ok(())
}

fn print_transfer(report: &TransferReport) {
    println!("temporal features (rows: test, columns: train)\n{}", report.temporal.to_csv());
    println!("non-temporal features\n{}", report.non_temporal.to_csv());
    let flips = report.signs.iter().filter(|r| r.flips).count();
    println!("{flips} of {} non-temporal coefficients flip sign", report.signs.len());
}

fn run(cli: Cli) -> Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match &cli.command {
        Command::Synth(args) => synth(args, cli.seed, &out_dir(&cli.out)?),
        Command::Cohort { adoptions, cohort } => {
            let out = out_dir(&cli.out)?;
            let log = load_adoptions(adoptions).map_err(|e| e.in_stage("ingest"))?;
            let c = resolve_cohort(&log, cohort.spec()).map_err(|e| e.in_stage("cohort"))?;
            c.write_jsonl(&log, out.join("cohort.jsonl"))?;
            println!(
                "{} items, median popularity {}, median time to k {:.3} days",
                c.len(),
                c.median_popularity,
                c.median_time_to_k()
            );
            Ok(())
        }
        Command::Featurize { data, cohort } => {
            let out = out_dir(&cli.out)?;
            let corpus = Corpus::load(&data.adoptions, &data.graph, !data.undirected, data.meta.as_deref())
                .map_err(|e| e.in_stage("ingest"))?;
            let c = resolve_cohort(&corpus.log, cohort.spec()).map_err(|e| e.in_stage("cohort"))?;
            let m = featurize_cohort(&c, &corpus).map_err(|e| e.in_stage("featurize"))?;
            m.write_csv(out.join("features.csv"))?;
            println!("{} rows × {} features", m.rows(), m.cols());
            Ok(())
        }
        Command::Train { features, learner } => {
            let out = out_dir(&cli.out)?;
            let m = features.load()?;
            let model = LogisticModel::fit_all(&m, &learner.hyperparams()).map_err(|e| e.in_stage("train"))?;
            write(out.join("model.json"), model.to_json()?)?;
            println!("trained on {} rows, {} epochs, converged: {}", m.rows(), model.epochs, model.converged);
            Ok(())
        }
        Command::Eval {
            features,
            model,
            folds,
            learner,
        } => {
            let out = out_dir(&cli.out)?;
            let m = features.load()?;
            let json = match model {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|e| Error::Io {
                        path: path.clone(),
                        source: e,
                    })?;
                    let model = LogisticModel::from_json(&text)?;
                    let cols = model
                        .features
                        .iter()
                        .map(|n| {
                            m.schema()
                                .index_of(n)
                                .ok_or_else(|| Error::SchemaMismatch(format!("feature `{n}` missing from data")))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let m = m.select_columns(&cols);
                    let rows: Vec<usize> = (0..m.rows()).collect();
                    let confusion = evaluate(&model, &m, &rows)?;
                    println!("accuracy {:.4} on {} rows", confusion.accuracy(), confusion.total());
                    serde_json::to_string_pretty(&confusion)?
                }
                None => {
                    let report = cross_validate(&m, *folds, seed, &learner.hyperparams())?;
                    println!("{folds}-fold accuracy {:.4}", report.accuracy);
                    serde_json::to_string_pretty(&report)?
                }
            };
            write(out.join("eval.json"), json)
        }
        Command::Ablate {
            features,
            folds,
            learner,
        } => {
            let out = out_dir(&cli.out)?;
            let m = FeatureMatrix::read_csv(&features.features)?;
            let categories = if features.categories.is_empty() {
                m.schema().categories()
            } else {
                features.categories.clone()
            };
            let entries = ablation(&m, &categories, *folds, seed, &learner.hyperparams())?;
            write(out.join("ablation.json"), serde_json::to_string_pretty(&entries)?)?;
            let csv = ablation_csv(&entries);
            print!("{csv}");
            write(out.join("ablation.csv"), csv)
        }
        Command::Scan {
            features,
            folds,
            learner,
        } => {
            let out = out_dir(&cli.out)?;
            let m = FeatureMatrix::read_csv(features)?;
            let scan = single_feature_scan(&m, *folds, seed, &learner.hyperparams())?;
            let csv = scan_csv(&scan);
            print!("{csv}");
            write(out.join("scan.csv"), csv)
        }
        Command::Transfer {
            config,
            dataset,
            folds,
            learner,
        } => {
            let report = match config {
                Some(path) => {
                    let mut cfg = TransferConfig::load(path)?;
                    if let Some(s) = cli.seed {
                        cfg.seed = s;
                    }
                    if let Some(o) = &cli.out {
                        cfg.out = o.clone();
                    }
                    run_transfer(&cfg)?
                }
                None => {
                    let datasets = dataset
                        .iter()
                        .map(|spec| {
                            let (name, path) = spec.split_once('=').ok_or_else(|| {
                                Error::InvalidArgument(format!("expected NAME=PATH, got `{spec}`"))
                            })?;
                            Ok((name.to_string(), FeatureMatrix::read_csv(path)?))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let report = transfer_report(&datasets, *folds, seed, &learner.hyperparams())?;
                    write_transfer_report(&report, &out_dir(&cli.out)?)?;
                    report
                }
            };
            print_transfer(&report);
            Ok(())
        }
        Command::Report { config } => {
            let mut cfg = ExperimentConfig::load(config)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if let Some(o) = &cli.out {
                cfg.out = o.clone();
            }
            let summary = run_experiment(&cfg)?;
            println!(
                "{}: {} items, median time to k {:.3} days",
                summary.dataset, summary.cohort_size, summary.median_time_to_k_days
            );
            for (set, acc) in &summary.accuracies {
                println!("  {set:<14} {acc:.4}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
