//! The `triage` command-line tool.
//!
//! Every subcommand starts from a [`RunConfig`] (defaults, then an optional
//! `--config` TOML file, then flags) and writes the resolved config next to
//! its outputs.

mod config;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use config::write_file;
pub use config::{Paths, RunConfig, DEFAULT_OUT_DIR, RUN_CONFIG_FILE};

use crate::classify::{
    CScaling, ClassWeight, GridResult, Optimizer, ParamGrid, Penalty, Prediction,
};
use crate::corpus::{corpus_stats, load_posts, require_labels, save_posts, CorpusFormat};
use crate::error::{Error, Result};
use crate::eval::{ablation_run, official_metrics, EvalReport, Metric};
use crate::features::{FeatureConfig, FeaturePreset};
use crate::model::{Estimator, TriageSystem};
use crate::synth::generate;
use crate::{LabeledPost, TriageLabel};

pub const MODEL_FILE: &str = "model.json";
pub const TRAIN_LOG_FILE: &str = "train_log.json";
pub const REPORT_FILE: &str = "report.json";
pub const CONFUSION_FILE: &str = "confusion.tsv";
pub const ABLATION_TEXT_FILE: &str = "ablation.txt";
pub const ABLATION_JSONL_FILE: &str = "ablation.jsonl";
pub const PREDICTIONS_FILE: &str = "predictions.tsv";

#[derive(Debug, Parser)]
#[command(name = "triage", version, about = "Severity triage for forum posts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit features and a classifier on a labeled corpus and save the model.
    Train(RunArgs),
    /// Score a saved model on a labeled test corpus.
    Eval(RunArgs),
    /// Compare feature sets: train and test one model per row.
    Ablate(RunArgs),
    /// Label unlabeled posts with a saved model.
    Predict(RunArgs),
    /// Label counts of a corpus.
    Stats {
        corpus: PathBuf,
        #[arg(long)]
        format: Option<CorpusFormat>,
    },
    /// Write a seeded synthetic train/test corpus.
    GenSynthetic(SynthArgs),
}

/// Flags shared by the run subcommands. Each overrides the matching
/// [`RunConfig`] field.
#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// TOML run config; flags take precedence over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long = "lexicons")]
    pub lexicon_manifest: Option<PathBuf>,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub negations: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,

    /// Named feature set (only-lexicons, lexicons-negation, tfidf-lexicons,
    /// tfidf-lexicons-negation, full, full-heuristics).
    #[arg(long)]
    pub preset: Option<FeaturePreset>,
    /// Explicit comma-separated feature blocks, e.g. `tfidf,lexicons,negation`.
    #[arg(long, value_delimiter = ',')]
    pub blocks: Option<Vec<String>>,
    #[arg(long)]
    pub max_features: Option<usize>,
    /// Ablation rows to run, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub rows: Option<Vec<String>>,

    #[arg(long)]
    pub estimator: Option<Estimator>,
    #[arg(long = "c")]
    pub c: Option<f64>,
    #[arg(long)]
    pub c_scaling: Option<CScaling>,
    #[arg(long)]
    pub penalty: Option<Penalty>,
    #[arg(long)]
    pub class_weight: Option<ClassWeight>,
    #[arg(long)]
    pub optimizer: Option<Optimizer>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Run a cross-validated grid search over the default grid.
    #[arg(long)]
    pub grid: bool,
    #[arg(long)]
    pub k_folds: Option<usize>,
    #[arg(long)]
    pub metric: Option<Metric>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub train_size: Option<usize>,
    #[arg(long)]
    pub test_size: Option<usize>,
}

fn parse_blocks(blocks: &[String], base: &FeatureConfig) -> Result<FeatureConfig> {
    let mut cfg = FeatureConfig {
        tfidf_max_features: base.tfidf_max_features,
        tfidf_max_ngram: base.tfidf_max_ngram,
        ..FeatureConfig::default()
    };
    for block in blocks {
        let flag = match block.trim() {
            "tfidf" => &mut cfg.tfidf,
            "lexicons" => &mut cfg.lexicons,
            "negation" => &mut cfg.negation,
            "surface" => &mut cfg.surface,
            "patterns" => &mut cfg.patterns,
            "sentiment" => &mut cfg.sentiment,
            "embeddings" => &mut cfg.embeddings,
            "user_rank" | "user-rank" | "rank" => &mut cfg.user_rank,
            "heuristics" => &mut cfg.heuristics,
            other => return Err(Error::Config(format!("unknown feature block {other:?}"))),
        };
        *flag = true;
    }
    Ok(cfg)
}

impl RunArgs {
    /// Defaults, then `--config`, then flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        fn set<T: Clone>(slot: &mut T, value: &Option<T>) {
            if let Some(v) = value {
                *slot = v.clone();
            }
        }
        fn set_opt<T: Clone>(slot: &mut Option<T>, value: &Option<T>) {
            if value.is_some() {
                *slot = value.clone();
            }
        }
        set(&mut cfg.seed, &self.seed);
        set_opt(&mut cfg.out_dir, &self.out_dir);
        let p = &mut cfg.paths;
        set_opt(&mut p.train, &self.train);
        set_opt(&mut p.test, &self.test);
        set_opt(&mut p.input, &self.input);
        set_opt(&mut p.lexicon_manifest, &self.lexicon_manifest);
        set_opt(&mut p.embeddings, &self.embeddings);
        set_opt(&mut p.negations, &self.negations);
        set_opt(&mut p.model, &self.model);

        if let Some(preset) = self.preset {
            cfg.preset = preset;
            cfg.features = None;
        }
        if let Some(blocks) = &self.blocks {
            cfg.features = Some(parse_blocks(blocks, &cfg.feature_config())?);
        }
        if let Some(n) = self.max_features {
            let mut f = cfg.feature_config();
            f.tfidf_max_features = n;
            cfg.features = Some(f);
        }
        set(&mut cfg.rows, &self.rows);

        let t = &mut cfg.training;
        set(&mut t.estimator, &self.estimator);
        set(&mut t.svm.c, &self.c);
        set(&mut t.svm.c_scaling, &self.c_scaling);
        set(&mut t.svm.penalty, &self.penalty);
        set(&mut t.svm.class_weight, &self.class_weight);
        set(&mut t.svm.optimizer, &self.optimizer);
        set(&mut t.svm.max_iterations, &self.max_iterations);
        set(&mut t.alpha, &self.alpha);
        set(&mut t.k, &self.k);
        set(&mut t.k_folds, &self.k_folds);
        set(&mut t.metric, &self.metric);
        if self.grid && t.grid.is_none() {
            t.grid = Some(ParamGrid::default());
        }
        Ok(cfg)
    }
}

/// Parse `args` and run the selected subcommand.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(args) => cmd_train(&args.resolve()?).map(drop),
        Command::Eval(args) => cmd_eval(&args.resolve()?).map(drop),
        Command::Ablate(args) => cmd_ablate(&args.resolve()?),
        Command::Predict(args) => cmd_predict(&args.resolve()?),
        Command::Stats { corpus, format } => {
            let format = format.unwrap_or_else(|| CorpusFormat::from_path(&corpus));
            let posts = load_posts(&corpus, format)?;
            println!("{}", corpus_stats(&posts)?);
            Ok(())
        }
        Command::GenSynthetic(args) => cmd_gen_synthetic(&args),
    }
}

fn load(path: &Path) -> Result<Vec<LabeledPost>> {
    load_posts(path, CorpusFormat::from_path(path))
}

fn model_path(cfg: &RunConfig) -> PathBuf {
    cfg.paths
        .model
        .clone()
        .unwrap_or_else(|| cfg.out_dir().join(MODEL_FILE))
}

fn train_log(system: &TriageSystem, posts: &[LabeledPost]) -> Result<String> {
    let labels = require_labels(posts)?;
    let mut counts = serde_json::Map::new();
    for l in TriageLabel::ALL {
        let n = labels.iter().filter(|&&x| x == l).count();
        counts.insert(l.as_str().to_string(), n.into());
    }
    let log = serde_json::json!({
        "fingerprint": system.pipeline.fingerprint(),
        "features": system.pipeline.config(),
        "dimension": system.pipeline.dim(),
        "train_posts": posts.len(),
        "label_counts": counts,
        "estimator": system.model.name(),
        "hyperparameters": system.cell,
        "search": system.search.as_ref().map(search_summary),
    });
    Ok(serde_json::to_string_pretty(&log).expect("log serializes") + "\n")
}

fn search_summary(result: &GridResult) -> serde_json::Value {
    let cells: Vec<serde_json::Value> = result
        .cells
        .iter()
        .map(|c| serde_json::json!({ "cell": c.cell.describe(), "mean": c.mean, "folds": c.folds }))
        .collect();
    serde_json::json!({
        "metric": result.metric,
        "best": result.best.describe(),
        "best_score": result.best_score,
        "cells": cells,
    })
}

/// Fit on `paths.train`; write the model, the training log and the config.
pub fn cmd_train(cfg: &RunConfig) -> Result<TriageSystem> {
    let train = load(cfg.require(&cfg.paths.train, "training corpus (--train)")?)?;
    let resources = cfg.resources()?;
    let system = TriageSystem::fit(
        &train,
        &cfg.feature_config(),
        resources,
        &cfg.training_spec(),
    )?;
    let out = cfg.out_dir();
    write_file(&model_path(cfg), &system.to_file().to_json())?;
    write_file(&out.join(TRAIN_LOG_FILE), &train_log(&system, &train)?)?;
    cfg.write_to(&out)?;
    eprintln!(
        "trained {} on {} posts ({})",
        system.model.name(),
        train.len(),
        system.cell.describe()
    );
    Ok(system)
}

fn confusion_tsv(report: &EvalReport) -> String {
    let mut out = String::from("truth\\predicted");
    for l in TriageLabel::ALL {
        write!(out, "\t{l}").unwrap();
    }
    out.push('\n');
    for t in TriageLabel::ALL {
        out.push_str(t.as_str());
        for p in TriageLabel::ALL {
            write!(out, "\t{}", report.confusion.get(t, p)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Score the model on `paths.test`; write the report and confusion matrix
/// and print the four triage metrics.
pub fn cmd_eval(cfg: &RunConfig) -> Result<EvalReport> {
    let test = load(cfg.require(&cfg.paths.test, "test corpus (--test)")?)?;
    let truth = require_labels(&test)?;
    let system = TriageSystem::load(model_path(cfg), cfg.resources()?)?;
    let predicted: Vec<TriageLabel> = system
        .predict_all(&test)?
        .into_iter()
        .map(|p| p.label)
        .collect();
    let report = official_metrics(&truth, &predicted)?;
    let out = cfg.out_dir();
    write_file(
        &out.join(REPORT_FILE),
        &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"),
    )?;
    write_file(&out.join(CONFUSION_FILE), &confusion_tsv(&report))?;
    cfg.write_to(&out)?;
    for m in [
        Metric::MacroF1NonGreen,
        Metric::FlaggedF1,
        Metric::UrgentF1,
        Metric::CrisisF1,
    ] {
        println!("{}\t{:.4}", m.name(), report.metric(m));
    }
    Ok(report)
}

/// Run the selected ablation rows and write the table as text and JSONL.
pub fn cmd_ablate(cfg: &RunConfig) -> Result<()> {
    let train = load(cfg.require(&cfg.paths.train, "training corpus (--train)")?)?;
    let test = load(cfg.require(&cfg.paths.test, "test corpus (--test)")?)?;
    let rows = cfg.ablation_rows()?;
    let table = ablation_run(
        &train,
        &test,
        &rows,
        &cfg.resources()?,
        &cfg.training_spec(),
    )?;
    let out = cfg.out_dir();
    let text = table.to_text();
    write_file(&out.join(ABLATION_TEXT_FILE), &text)?;
    write_file(&out.join(ABLATION_JSONL_FILE), &table.to_jsonl())?;
    cfg.write_to(&out)?;
    print!("{text}");
    Ok(())
}

/// Tab-separated predictions with a header line, in input order.
pub fn predictions_tsv(posts: &[LabeledPost], predictions: &[Prediction]) -> String {
    let mut out = String::from("post_id\tlabel");
    for l in TriageLabel::ALL {
        write!(out, "\tscore_{l}").unwrap();
    }
    out.push('\n');
    for (post, pred) in posts.iter().zip(predictions) {
        write!(out, "{}\t{}", post.post_id, pred.label).unwrap();
        for s in pred.scores {
            write!(out, "\t{s}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Predict `paths.input`. Writes `predictions.tsv` under the output
/// directory when one is configured, otherwise prints to stdout.
pub fn cmd_predict(cfg: &RunConfig) -> Result<()> {
    let posts = load(cfg.require(&cfg.paths.input, "input corpus (--input)")?)?;
    let system = TriageSystem::load(model_path(cfg), cfg.resources()?)?;
    let predictions = system.predict_all(&posts)?;
    let tsv = predictions_tsv(&posts, &predictions);
    match &cfg.out_dir {
        Some(dir) => {
            write_file(&dir.join(PREDICTIONS_FILE), &tsv)?;
            cfg.write_to(dir)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(tsv.as_bytes())
                .map_err(|e| Error::io("<stdout>", e))?;
        }
    }
    Ok(())
}

/// Write `train.jsonl` and `test.jsonl` under the output directory.
pub fn cmd_gen_synthetic(args: &SynthArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(dir) = &args.out_dir {
        cfg.out_dir = Some(dir.clone());
    }
    let synth = &mut cfg.synthetic;
    if let Some(seed) = args.seed {
        synth.seed = seed;
    }
    if let Some(n) = args.train_size {
        synth.train = n;
    }
    if let Some(n) = args.test_size {
        synth.test = n;
    }
    let synth = cfg.synthetic;
    let mut rng = ChaCha8Rng::seed_from_u64(synth.seed);
    let train = generate(synth.train, "train", &synth, &mut rng);
    let test = generate(synth.test, "test", &synth, &mut rng);
    let out = cfg.out_dir();
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    save_posts(out.join("train.jsonl"), &train, CorpusFormat::Jsonl)?;
    save_posts(out.join("test.jsonl"), &test, CorpusFormat::Jsonl)?;
    cfg.write_to(&out)?;
    eprintln!(
        "wrote {} train and {} test posts to {}",
        train.len(),
        test.len(),
        out.display()
    );
    Ok(())
}
