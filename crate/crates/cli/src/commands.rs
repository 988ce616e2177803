use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context as _, Result};
use log::info;
use mlinter_core::classifier::{train as train_model, LineClassifier, TrainedClassifier};
use mlinter_core::corpus::{
    analyze as run_analysis, cochran_sample_size, compute_length_threshold, ingest as run_ingest,
    load_manifest, stats as corpus_stats, CorpusStats, CorpusStore, CorpusView, IngestOptions,
    ViolationIndex,
};
use mlinter_core::dataset::{
    build_pools, sample_training_set, ExamplePool, LearningConfig, Ratio, TrainingSize,
};
use mlinter_core::experiment::{child_seed, read_results, run_matrix, write_results, MatrixSpec};
use mlinter_core::lint::{lint_text, sort_warnings};
use mlinter_core::oracle::RuleId;
use mlinter_core::stats::emit_report;
use mlinter_core::synth::{generate, SynthConfig};
use mlinter_core::LinearBackend;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::config::FileConfig;
use crate::workdir::{now, read_json, require, write_json, RunManifest, WorkDir};
use crate::{
    AnalyzeArgs, DatasetArgs, ExperimentArgs, IngestArgs, LintArgs, StatsArgs, Status, SynthArgs,
    ThresholdArgs, TrainArgs,
};

pub struct Context {
    pub dir: WorkDir,
    pub config: FileConfig,
}

impl Context {
    fn record(
        &self,
        command: &str,
        seed: u64,
        settings: serde_json::Value,
        started: String,
    ) -> Result<()> {
        let manifest = RunManifest::new(command, seed, settings, &self.dir.corpus(), started)?;
        write_json(&self.dir.manifest(command), &manifest)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ThresholdRecord {
    pub confidence: f64,
    pub precision: f64,
    pub proportion: f64,
    pub z: f64,
    pub sample_size: u64,
    pub files_sampled: usize,
    pub quantile: f64,
    pub threshold: usize,
    pub seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub rules: Vec<RuleId>,
    /// `None` when every line was analyzed.
    pub max_len: Option<usize>,
    pub stats: CorpusStats,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PoolsRecord {
    pub min_examples: usize,
    pub rules: Vec<RuleId>,
    pub excluded: Vec<ExcludedRule>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ExcludedRule {
    pub rule: RuleId,
    pub violations: usize,
}

fn parse_rules(list: &str) -> Result<Vec<RuleId>> {
    let rules = RuleId::parse_list(list)?;
    if rules.is_empty() {
        bail!("no rules selected");
    }
    Ok(rules)
}

fn parse_csv<T: std::str::FromStr<Err = mlinter_core::Error>>(list: &str) -> Result<Vec<T>> {
    let items = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(anyhow::Error::from))
        .collect::<Result<Vec<T>>>()?;
    if items.is_empty() {
        bail!("empty list `{list}`");
    }
    Ok(items)
}

pub fn ingest(ctx: &Context, args: IngestArgs) -> Result<Status> {
    let started = now();
    let section = &ctx.config.ingest;
    let roots: Vec<PathBuf> = if args.roots.is_empty() {
        section
            .roots
            .clone()
            .unwrap_or_default()
            .into_iter()
            .map(PathBuf::from)
            .collect()
    } else {
        args.roots
    };
    if roots.is_empty() {
        bail!("no --root given");
    }
    for root in &roots {
        if !root.is_dir() {
            bail!("root {} is not a directory", root.display());
        }
    }
    let mut options = IngestOptions::new(roots.clone());
    let manifest = args
        .manifest
        .or_else(|| section.manifest.as_ref().map(PathBuf::from));
    if let Some(path) = &manifest {
        options.manifest = load_manifest(path)?;
    }
    if !args.exclude_suffixes.is_empty() {
        options.exclude_suffixes = args.exclude_suffixes;
    } else if let Some(s) = &section.exclude_suffixes {
        options.exclude_suffixes = s.clone();
    }
    let store = run_ingest(&options)?;
    if store.is_empty() {
        bail!("no matching files under {roots:?}");
    }
    let dir = match args.out {
        Some(out) => WorkDir::new(out),
        None => WorkDir::new(ctx.dir.root()),
    };
    store.save_jsonl(&dir.corpus())?;
    println!(
        "ingested {} files, {} lines into {}",
        store.files().len(),
        store.lines().len(),
        dir.corpus().display()
    );
    let settings = json!({
        "roots": roots,
        "manifest": manifest,
        "extensions": options.extensions,
        "exclude_suffixes": options.exclude_suffixes,
    });
    let manifest = RunManifest::new("ingest", 0, settings, &dir.corpus(), started)?;
    write_json(&dir.manifest("ingest"), &manifest)?;
    Ok(Status::Ok)
}

pub fn threshold(ctx: &Context, args: ThresholdArgs) -> Result<Status> {
    let started = now();
    let section = &ctx.config.threshold;
    let confidence = args.confidence.or(section.confidence).unwrap_or(0.95);
    let precision = args.precision.or(section.precision).unwrap_or(0.05);
    let quantile = args.quantile.or(section.quantile).unwrap_or(0.99);
    let seed = ctx.config.seed(args.seed)?;
    if !(confidence > 0.0 && confidence < 1.0) {
        bail!("confidence must be in (0, 1), got {confidence}");
    }
    let z = Normal::standard().inverse_cdf(1.0 - (1.0 - confidence) / 2.0);
    let proportion = 0.5;
    let sample_size = cochran_sample_size(z, precision, proportion)?;
    let store = ctx.dir.load_corpus()?;
    let n_files = usize::try_from(sample_size).unwrap_or(usize::MAX);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let threshold = compute_length_threshold(&store, n_files, quantile, &mut rng)?;
    let record = ThresholdRecord {
        confidence,
        precision,
        proportion,
        z,
        sample_size,
        files_sampled: n_files.min(store.files().len()),
        quantile,
        threshold,
        seed,
    };
    write_json(&ctx.dir.threshold(), &record)?;
    println!("sample size: {sample_size}");
    println!("threshold: {threshold}");
    ctx.record(
        "threshold",
        seed,
        json!({"confidence": confidence, "precision": precision, "quantile": quantile}),
        started,
    )?;
    Ok(Status::Ok)
}

fn view_for<'a>(store: &'a CorpusStore, max_len: Option<usize>) -> Result<CorpusView<'a>> {
    Ok(match max_len {
        Some(m) => store.view().filter(m)?,
        None => store.view(),
    })
}

pub fn analyze(ctx: &Context, args: AnalyzeArgs) -> Result<Status> {
    let started = now();
    let rules_arg = args
        .rules
        .or(ctx.config.analyze.rules.clone())
        .unwrap_or_else(|| "all".into());
    let rules = parse_rules(&rules_arg)?;
    let store = ctx.dir.load_corpus()?;
    let max_len = if args.no_threshold {
        None
    } else {
        let t: ThresholdRecord = read_json(&ctx.dir.threshold())?;
        Some(t.threshold)
    };
    let view = view_for(&store, max_len)?;
    let index = run_analysis(&view, &rules)?;
    index.save_jsonl(&ctx.dir.violations())?;
    let stats = corpus_stats(&store, &view, &index);
    println!("{} lines analyzed in {} files", stats.lines, stats.files);
    for (rule, s) in &stats.per_rule {
        println!(
            "{rule:<22} {:>8} {:>9.4}%",
            s.violation_count,
            100.0 * s.ratio,
            rule = rule.name()
        );
    }
    write_json(
        &ctx.dir.analysis(),
        &AnalysisRecord {
            rules: rules.clone(),
            max_len,
            stats,
        },
    )?;
    ctx.record(
        "analyze",
        0,
        json!({"rules": rules, "max_len": max_len}),
        started,
    )?;
    Ok(Status::Ok)
}

/// Corpus, analysis record and violation index written by earlier stages.
fn load_analysis(dir: &WorkDir) -> Result<(CorpusStore, AnalysisRecord, ViolationIndex)> {
    let store = dir.load_corpus()?;
    let analysis: AnalysisRecord = read_json(&dir.analysis())?;
    let index = ViolationIndex::load_jsonl(&require(&dir.violations())?, &analysis.rules)?;
    Ok((store, analysis, index))
}

pub fn dataset(ctx: &Context, args: DatasetArgs) -> Result<Status> {
    let started = now();
    let min_examples = args
        .min_examples
        .or(ctx.config.dataset.min_examples)
        .unwrap_or(1000);
    let (store, analysis, index) = load_analysis(&ctx.dir)?;
    let view = view_for(&store, analysis.max_len)?;
    let set = build_pools(&index, &view, &analysis.rules, min_examples)?;
    let pools_dir = ctx.dir.root().join("pools");
    if pools_dir.exists() {
        fs::remove_dir_all(&pools_dir)
            .with_context(|| format!("clearing {}", pools_dir.display()))?;
    }
    for pool in &set.pools {
        pool.save_jsonl(&ctx.dir.pool(pool.rule))?;
        println!(
            "{:<22} {:>7} violations {:>7} fixed {:>8} extant",
            pool.rule.name(),
            pool.violations.len(),
            pool.fixed.len(),
            pool.extant.len()
        );
    }
    for (rule, n) in &set.excluded {
        println!(
            "{:<22} excluded ({n} < {min_examples} violations)",
            rule.name()
        );
    }
    let record = PoolsRecord {
        min_examples,
        rules: set.pools.iter().map(|p| p.rule).collect(),
        excluded: set
            .excluded
            .iter()
            .map(|&(rule, violations)| ExcludedRule { rule, violations })
            .collect(),
    };
    write_json(&ctx.dir.pools_index(), &record)?;
    ctx.record("dataset", 0, json!({"min_examples": min_examples}), started)?;
    Ok(Status::Ok)
}

/// Pools for `requested` (or every pooled rule), in rule order.
fn load_pools(dir: &WorkDir, requested: Option<&str>) -> Result<Vec<ExamplePool>> {
    let record: PoolsRecord = read_json(&dir.pools_index())?;
    let rules = match requested {
        Some(list) => parse_rules(list)?,
        None => record.rules.clone(),
    };
    let mut pools = Vec::new();
    for rule in rules {
        if !record.rules.contains(&rule) {
            bail!(
                "no pool for {rule}; run `dataset` with a lower --min-examples or pick other rules"
            );
        }
        pools.push(ExamplePool::load_jsonl(&require(&dir.pool(rule))?, rule)?);
    }
    pools.sort_by_key(|p| p.rule);
    if pools.is_empty() {
        bail!("no pools to use");
    }
    Ok(pools)
}

pub fn train(ctx: &Context, args: TrainArgs) -> Result<Status> {
    let started = now();
    let section = &ctx.config.train;
    let seed = ctx.config.seed(args.seed)?;
    let size: TrainingSize = args
        .size
        .or(section.size.clone())
        .unwrap_or_else(|| "L".into())
        .parse()?;
    let ratio: Ratio = args
        .ratio
        .or(section.ratio.clone())
        .unwrap_or_else(|| "VFE".into())
        .parse()?;
    let config = LearningConfig::new(size, ratio);
    let classifier = ctx.config.classifier();
    let pools = load_pools(&ctx.dir, args.rules.or(section.rules.clone()).as_deref())?;
    for pool in &pools {
        let run_seed = child_seed(seed, pool.rule, config, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
        let ts = sample_training_set(pool, config, &mut rng)?;
        let model = train_model(
            &ts,
            &mlinter_core::ClassifierConfig {
                seed: run_seed,
                ..classifier.clone()
            },
        )?;
        let path = ctx.dir.model(pool.rule);
        model.save_json(&path)?;
        println!("{:<22} {config} -> {}", pool.rule.name(), path.display());
    }
    ctx.record(
        "train",
        seed,
        json!({"size": size, "ratio": ratio, "rules": pools.iter().map(|p| p.rule).collect::<Vec<_>>(), "classifier": classifier}),
        started,
    )?;
    Ok(Status::Ok)
}

pub fn experiment(ctx: &Context, args: ExperimentArgs) -> Result<Status> {
    let started = now();
    let section = &ctx.config.experiment;
    let seed = ctx.config.seed(args.seed)?;
    let sizes: Vec<TrainingSize> = parse_csv(
        &args
            .sizes
            .or(section.sizes.clone())
            .unwrap_or_else(|| "S,M,L".into()),
    )?;
    let ratios: Vec<Ratio> = parse_csv(
        &args
            .ratios
            .or(section.ratios.clone())
            .unwrap_or_else(|| "VF,VE,VFE".into()),
    )?;
    let reps = args.reps.or(section.reps).unwrap_or(100);
    let realistic_files = args
        .realistic_files
        .or(section.realistic_files)
        .unwrap_or(5);
    let classifier = ctx.config.classifier();

    let (store, analysis, index) = load_analysis(&ctx.dir)?;
    let view = view_for(&store, analysis.max_len)?;
    let pools = load_pools(&ctx.dir, args.rules.or(section.rules.clone()).as_deref())?;
    let matrix = MatrixSpec {
        configs: sizes
            .iter()
            .flat_map(|&s| ratios.iter().map(move |&r| LearningConfig::new(s, r)))
            .collect(),
        repetitions: reps,
        master_seed: seed,
        realistic_files,
    };
    info!(
        "{} rules x {} configurations x {reps} repetitions on {} threads",
        pools.len(),
        matrix.configs.len(),
        rayon::current_num_threads()
    );
    let backend = LinearBackend::new(classifier.clone());
    let results = run_matrix(&matrix, &pools, &view, &index, &backend)?;
    write_results(&ctx.dir.results(), &results)?;
    println!(
        "{} results written to {}",
        results.len(),
        ctx.dir.results().display()
    );
    ctx.record(
        "experiment",
        seed,
        json!({
            "rules": pools.iter().map(|p| p.rule).collect::<Vec<_>>(),
            "sizes": sizes,
            "ratios": ratios,
            "reps": reps,
            "realistic_files": realistic_files,
            "classifier": classifier,
        }),
        started,
    )?;
    Ok(Status::Ok)
}

pub fn stats(ctx: &Context, args: StatsArgs) -> Result<Status> {
    let started = now();
    let path = args.results.unwrap_or_else(|| ctx.dir.results());
    let results = read_results(&require(&path)?)?;
    if results.is_empty() {
        bail!("{} has no results", path.display());
    }
    let out = args.out.unwrap_or_else(|| ctx.dir.report());
    let bundle = emit_report(&results, &out)?;
    let summary = fs::read_to_string(&bundle.summary)
        .with_context(|| format!("reading {}", bundle.summary.display()))?;
    print!("{summary}");
    ctx.record("stats", 0, json!({"results": path, "out": out}), started)?;
    Ok(Status::Ok)
}

pub fn lint(ctx: &Context, args: LintArgs) -> Result<Status> {
    let model_paths = if args.models.is_empty() {
        let dir = ctx.dir.root().join("models");
        let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
            .with_context(|| format!("no --model given and cannot read {}", dir.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        if paths.is_empty() {
            bail!("no models in {}", dir.display());
        }
        paths
    } else {
        args.models
    };
    let models = model_paths
        .iter()
        .map(|p| TrainedClassifier::load_json(p).map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&dyn LineClassifier> = models.iter().map(|m| m as &dyn LineClassifier).collect();
    let max_len = match args.max_len {
        Some(m) => Some(m),
        None if ctx.dir.threshold().exists() => {
            let t: ThresholdRecord = read_json(&ctx.dir.threshold())?;
            Some(t.threshold)
        }
        None => None,
    };
    let mut texts = BTreeMap::new();
    for file in &args.files {
        let text =
            fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
        texts.insert(file.display().to_string(), text);
    }
    let mut warnings: Vec<_> = texts
        .iter()
        .flat_map(|(path, text)| lint_text(path, text, &refs, max_len))
        .collect();
    sort_warnings(&mut warnings);
    for w in &warnings {
        println!("{w}");
    }
    Ok(if warnings.is_empty() {
        Status::Ok
    } else {
        Status::Warnings
    })
}

pub fn synth(ctx: &Context, args: SynthArgs) -> Result<Status> {
    let seed = ctx.config.seed(args.seed)?;
    let config = SynthConfig {
        projects: args.projects,
        files: args.files,
        lines_per_file: args.lines,
        violation_rate: args.rate,
        rules: parse_rules(&args.rules)?,
        seed,
    };
    let corpus = generate(&config)?;
    corpus.write_to(&args.out)?;
    println!(
        "wrote {} files, {} lines, {} planted violations to {}",
        corpus.files.len(),
        corpus.line_count(),
        corpus.planted.len(),
        args.out.display()
    );
    Ok(Status::Ok)
}
