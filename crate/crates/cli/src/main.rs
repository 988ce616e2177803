//! `mlinter`: build line-level datasets from JavaScript projects, train
//! per-practice classifiers, evaluate them, and lint files with them.

mod commands;
mod config;
mod workdir;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::FileConfig;
use crate::workdir::WorkDir;

#[derive(Debug, Parser)]
#[command(name = "mlinter", version, about, propagate_version = true)]
struct Cli {
    /// Work directory shared by all pipeline stages.
    #[arg(long, global = true, default_value = "mlinter-work")]
    dir: PathBuf,

    /// TOML file with default values for any flag; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for analyze and experiment (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// More log output; repeat for debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Read .js files under the given roots into corpus.jsonl.
    Ingest(IngestArgs),
    /// Compute the line-length threshold from a random sample of files.
    Threshold(ThresholdArgs),
    /// Run the reference linter over every in-threshold line.
    Analyze(AnalyzeArgs),
    /// Build per-rule example pools from the analysis.
    Dataset(DatasetArgs),
    /// Train one classifier per rule and save it under models/.
    Train(TrainArgs),
    /// Run the bootstrap experiment and write results.jsonl.
    Experiment(ExperimentArgs),
    /// Summarize results.jsonl into the report directory.
    Stats(StatsArgs),
    /// Flag lines that trained models predict as non-compliant.
    Lint(LintArgs),
    /// Write a synthetic corpus with planted violations.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Directory to scan; repeatable.
    #[arg(long = "root", value_name = "PATH")]
    pub roots: Vec<PathBuf>,
    /// Clone manifest (JSON array of {url, commit_sha, local_path}).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// File-name suffix to skip; repeatable [default: .min.js].
    #[arg(long = "exclude-suffix", value_name = "SUFFIX")]
    pub exclude_suffixes: Vec<String>,
    /// Output directory [default: --dir].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Confidence level for the file sample size [default: 0.95].
    #[arg(long)]
    pub confidence: Option<f64>,
    /// Margin of error for the file sample size [default: 0.05].
    #[arg(long)]
    pub precision: Option<f64>,
    /// Quantile of sampled line lengths used as the threshold [default: 0.99].
    #[arg(long)]
    pub quantile: Option<f64>,
    /// Seed for the file sample [default: MLINTER_SEED or 0].
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Comma-separated rule names or `all` [default: all].
    #[arg(long)]
    pub rules: Option<String>,
    /// Analyze every line instead of applying threshold.json.
    #[arg(long)]
    pub no_threshold: bool,
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// Minimum violations for a rule to get a pool [default: 1000].
    #[arg(long)]
    pub min_examples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Comma-separated rule names or `all` [default: every pooled rule].
    #[arg(long)]
    pub rules: Option<String>,
    /// Training-set size: S, M, L or a number [default: L].
    #[arg(long)]
    pub size: Option<String>,
    /// Composition: VF, VE or VFE [default: VFE].
    #[arg(long)]
    pub ratio: Option<String>,
    /// Master seed [default: MLINTER_SEED or 0].
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Comma-separated rule names or `all` [default: every pooled rule].
    #[arg(long)]
    pub rules: Option<String>,
    /// Comma-separated sizes [default: S,M,L].
    #[arg(long)]
    pub sizes: Option<String>,
    /// Comma-separated ratios [default: VF,VE,VFE].
    #[arg(long)]
    pub ratios: Option<String>,
    /// Repetitions per rule and configuration [default: 100].
    #[arg(long)]
    pub reps: Option<usize>,
    /// Master seed [default: MLINTER_SEED or 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Whole files per realistic test set [default: 5].
    #[arg(long)]
    pub realistic_files: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Results file [default: <dir>/results.jsonl].
    #[arg(long)]
    pub results: Option<PathBuf>,
    /// Report directory [default: <dir>/report].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LintArgs {
    /// Model file; repeatable [default: every model in <dir>/models].
    #[arg(long = "model", value_name = "FILE")]
    pub models: Vec<PathBuf>,
    /// Skip lines longer than this [default: threshold.json if present].
    #[arg(long)]
    pub max_len: Option<usize>,
    /// Files to lint.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output directory; one subdirectory per project.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of project directories.
    #[arg(long, default_value_t = 10)]
    pub projects: usize,
    /// Number of files across all projects.
    #[arg(long, default_value_t = 600)]
    pub files: usize,
    /// Lines per file.
    #[arg(long, default_value_t = 200)]
    pub lines: usize,
    /// Per-rule probability that a line carries a planted violation.
    #[arg(long, default_value_t = 0.009)]
    pub rate: f64,
    /// Comma-separated rule names or `all`.
    #[arg(long, default_value = "all")]
    pub rules: String,
    /// Generator seed [default: MLINTER_SEED or 0].
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Outcome of a command that did not fail.
pub enum Status {
    Ok,
    Warnings,
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    let file_config = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let jobs = cli.jobs.or(file_config.jobs);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            anyhow::bail!("--jobs must be at least 1");
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build()?;
    let ctx = commands::Context {
        dir: WorkDir::new(&cli.dir),
        config: file_config,
    };
    pool.install(|| match cli.command {
        Command::Ingest(a) => commands::ingest(&ctx, a),
        Command::Threshold(a) => commands::threshold(&ctx, a),
        Command::Analyze(a) => commands::analyze(&ctx, a),
        Command::Dataset(a) => commands::dataset(&ctx, a),
        Command::Train(a) => commands::train(&ctx, a),
        Command::Experiment(a) => commands::experiment(&ctx, a),
        Command::Stats(a) => commands::stats(&ctx, a),
        Command::Lint(a) => commands::lint(&ctx, a),
        Command::Synth(a) => commands::synth(&ctx, a),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Warnings) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
