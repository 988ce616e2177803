//! Out-of-sample bootstrap harness.
//!
//! Each repetition draws a training set, trains a classifier, and scores it
//! on two test sets:
//!
//! - **balanced**: drawn without replacement from pool instances the
//!   training set did not use, with the same per-category counts as the
//!   training composition;
//! - **realistic**: every in-threshold line of `n_files` whole files that
//!   contain at least one violation of the rule and did not contribute any
//!   training instance, labeled by the oracle.
//!
//! # Seeds
//!
//! Repetition seeds derive from the master seed with splitmix64:
//!
//! ```text
//! h = splitmix64(master)
//! h = splitmix64(h ^ fnv1a64(rule name))
//! h = splitmix64(h ^ size)        // example count
//! h = splitmix64(h ^ ratio)       // VF = 0, VE = 1, VFE = 2
//! seed = splitmix64(h ^ repetition)
//! ```
//!
//! The repetition RNG (ChaCha8 seeded with `seed`) drives training-set
//! sampling, then the balanced test, then the realistic test; the backend
//! receives `seed` for its own randomness.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{Backend, LineClassifier};
use crate::corpus::{CorpusView, FileId, LineRef, ViolationIndex};
use crate::dataset::{
    sample_training_set, ExampleKind, ExamplePool, Label, LearningConfig, Ratio, TrainingSet,
};
use crate::error::{Error, Result};
use crate::jsonl;
use crate::numeric::{fnv1a64, splitmix64};
use crate::oracle::RuleId;

pub const RESULTS_SCHEMA_VERSION: u32 = 1;

/// Confusion counts with "positive" meaning non-compliant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub accuracy: Option<f64>,
    pub f1: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

impl Metrics {
    pub fn from_counts(tp: usize, fp: usize, tn: usize, fn_: usize) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let accuracy = ratio(tp + tn, tp + fp + tn + fn_);
        let f1 = match (precision, recall) {
            (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
            _ => None,
        };
        Metrics {
            tp,
            fp,
            tn,
            fn_,
            precision,
            recall,
            accuracy,
            f1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn positives(&self) -> usize {
        self.tp + self.fn_
    }

    /// True-positive rate; same as recall.
    pub fn tpr(&self) -> Option<f64> {
        self.recall
    }

    pub fn fpr(&self) -> Option<f64> {
        ratio(self.fp, self.fp + self.tn)
    }

    pub fn base_rate(&self) -> Option<f64> {
        ratio(self.positives(), self.total())
    }
}

/// Precision implied by a true-positive rate, a false-positive rate and
/// the share of positives: `r·tpr / (r·tpr + (1 − r)·fpr)`.
///
/// `None` when the denominator is zero.
pub fn expected_precision(tpr: f64, fpr: f64, base_rate: f64) -> Option<f64> {
    let hits = base_rate * tpr;
    let denom = hits + (1.0 - base_rate) * fpr;
    (denom > 0.0).then(|| hits / denom)
}

/// [`expected_precision`] evaluated from a confusion matrix. An undefined
/// rate only occurs when its class is absent, where its weight is zero.
pub fn implied_precision(m: &Metrics) -> Option<f64> {
    expected_precision(
        m.tpr().unwrap_or(0.0),
        m.fpr().unwrap_or(0.0),
        m.base_rate()?,
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestExample {
    pub text: String,
    pub label: Label,
    pub line: LineRef,
    pub kind: Option<ExampleKind>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TestSet {
    pub examples: Vec<TestExample>,
    /// Files the realistic set was drawn from; empty for balanced sets.
    pub files: Vec<FileId>,
}

impl TestSet {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.examples
            .iter()
            .filter(|e| e.label.is_positive())
            .count()
    }

    pub fn base_rate(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.positives() as f64 / self.len() as f64
        }
    }
}

/// Same per-category counts as the training set, drawn without replacement
/// from instances the training set did not use.
pub fn build_balanced_test<R: Rng + ?Sized>(
    pool: &ExamplePool,
    ts: &TrainingSet,
    rng: &mut R,
) -> Result<TestSet> {
    let mut examples = Vec::with_capacity(ts.examples.len());
    for kind in ExampleKind::ALL {
        let wanted = ts.count(kind);
        if wanted == 0 {
            continue;
        }
        let candidates: Vec<_> = pool
            .category(kind)
            .iter()
            .filter(|e| !ts.drawn_instances.contains(&e.key()))
            .collect();
        if candidates.len() < wanted {
            return Err(Error::InsufficientInstances {
                category: kind.name().into(),
                needed: wanted,
                available: candidates.len(),
            });
        }
        for i in sample(rng, candidates.len(), wanted) {
            let e = candidates[i];
            examples.push(TestExample {
                text: e.text.clone(),
                label: e.label,
                line: LineRef {
                    file_id: e.origin.file_id,
                    line_no: e.origin.line_no,
                },
                kind: Some(e.kind),
            });
        }
    }
    Ok(TestSet {
        examples,
        files: Vec::new(),
    })
}

/// Per-rule lookup tables for building realistic test sets.
#[derive(Debug, Clone)]
pub struct RealisticSource<'v, 'a> {
    view: &'v CorpusView<'a>,
    violating_files: Vec<FileId>,
    flagged: HashSet<LineRef>,
}

impl<'v, 'a> RealisticSource<'v, 'a> {
    pub fn new(view: &'v CorpusView<'a>, index: &ViolationIndex, rule: RuleId) -> Self {
        Self {
            view,
            violating_files: index.violating_files(rule),
            flagged: index.violations(rule).iter().map(|v| v.line).collect(),
        }
    }

    pub fn eligible_files(&self, ts: &TrainingSet) -> Vec<FileId> {
        let used = ts.origin_files();
        self.violating_files
            .iter()
            .copied()
            .filter(|f| !used.contains(f))
            .collect()
    }

    pub fn build<R: Rng + ?Sized>(
        &self,
        ts: &TrainingSet,
        n_files: usize,
        rng: &mut R,
    ) -> Result<TestSet> {
        let eligible = self.eligible_files(ts);
        if eligible.len() < n_files || n_files == 0 {
            return Err(Error::InsufficientInstances {
                category: "realistic test files".into(),
                needed: n_files.max(1),
                available: eligible.len(),
            });
        }
        let mut files: Vec<FileId> = sample(rng, eligible.len(), n_files)
            .into_iter()
            .map(|i| eligible[i])
            .collect();
        files.sort_unstable();
        let examples = files
            .iter()
            .flat_map(|&f| self.view.file_lines(f))
            .map(|l| {
                let key = l.key();
                TestExample {
                    text: l.text.clone(),
                    label: if self.flagged.contains(&key) {
                        Label::NonCompliant
                    } else {
                        Label::Compliant
                    },
                    line: key,
                    kind: None,
                }
            })
            .collect();
        Ok(TestSet { examples, files })
    }
}

/// All in-threshold lines of `n_files` eligible files, labeled by the oracle.
pub fn build_realistic_test<R: Rng + ?Sized>(
    view: &CorpusView<'_>,
    index: &ViolationIndex,
    ts: &TrainingSet,
    rule: RuleId,
    n_files: usize,
    rng: &mut R,
) -> Result<TestSet> {
    RealisticSource::new(view, index, rule).build(ts, n_files, rng)
}

pub fn evaluate(model: &dyn LineClassifier, test: &TestSet) -> Metrics {
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for ex in &test.examples {
        let predicted = model.predict(&ex.text).label.is_positive();
        match (predicted, ex.label.is_positive()) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    Metrics::from_counts(tp, fp, tn, fn_)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSpec {
    pub rule: RuleId,
    pub config: LearningConfig,
    pub repetitions: usize,
    pub master_seed: u64,
    pub realistic_files: usize,
}

impl RunSpec {
    pub fn new(rule: RuleId, config: LearningConfig, repetitions: usize, master_seed: u64) -> Self {
        Self {
            rule,
            config,
            repetitions,
            master_seed,
            realistic_files: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub schema_version: u32,
    pub rule: RuleId,
    pub size: crate::dataset::TrainingSize,
    pub ratio: Ratio,
    pub repetition: usize,
    pub seed: u64,
    pub balanced: Metrics,
    pub realistic: Metrics,
    pub realistic_base_rate: f64,
    pub realistic_files: Vec<FileId>,
}

impl RunResult {
    pub fn config(&self) -> LearningConfig {
        LearningConfig::new(self.size, self.ratio)
    }

    fn sort_key(&self) -> (RuleId, crate::dataset::TrainingSize, Ratio, usize) {
        (self.rule, self.size, self.ratio, self.repetition)
    }
}

pub fn child_seed(master: u64, rule: RuleId, config: LearningConfig, repetition: usize) -> u64 {
    let ratio_code = match config.ratio {
        Ratio::VF => 0u64,
        Ratio::VE => 1,
        Ratio::VFE => 2,
    };
    let mut h = splitmix64(master);
    h = splitmix64(h ^ fnv1a64(rule.name().as_bytes()));
    h = splitmix64(h ^ config.size.count() as u64);
    h = splitmix64(h ^ ratio_code);
    splitmix64(h ^ repetition as u64)
}

fn run_one(
    spec: &RunSpec,
    repetition: usize,
    pool: &ExamplePool,
    realistic: &RealisticSource<'_, '_>,
    backend: &dyn Backend,
) -> Result<RunResult> {
    let seed = child_seed(spec.master_seed, spec.rule, spec.config, repetition);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ts = sample_training_set(pool, spec.config, &mut rng)?;
    let balanced_test = build_balanced_test(pool, &ts, &mut rng)?;
    let realistic_test = realistic.build(&ts, spec.realistic_files, &mut rng)?;
    let model = backend.train(&ts, seed)?;
    Ok(RunResult {
        schema_version: RESULTS_SCHEMA_VERSION,
        rule: spec.rule,
        size: spec.config.size,
        ratio: spec.config.ratio,
        repetition,
        seed,
        balanced: evaluate(model.as_ref(), &balanced_test),
        realistic: evaluate(model.as_ref(), &realistic_test),
        realistic_base_rate: realistic_test.base_rate(),
        realistic_files: realistic_test.files,
    })
}

/// Run every repetition of one (rule, config) cell. Repetitions run in
/// parallel on the current rayon pool; results come back in repetition order.
pub fn run_experiment(
    spec: &RunSpec,
    pool: &ExamplePool,
    view: &CorpusView<'_>,
    index: &ViolationIndex,
    backend: &dyn Backend,
) -> Result<Vec<RunResult>> {
    if spec.repetitions == 0 {
        return Err(Error::invalid("repetitions must be at least 1"));
    }
    if pool.rule != spec.rule {
        return Err(Error::invalid(format!(
            "pool is for {} but the run is for {}",
            pool.rule, spec.rule
        )));
    }
    let realistic = RealisticSource::new(view, index, spec.rule);
    (0..spec.repetitions)
        .into_par_iter()
        .map(|rep| {
            run_one(spec, rep, pool, &realistic, backend).map_err(|e| Error::Repetition {
                index: rep,
                source: Box::new(e),
            })
        })
        .collect()
}

/// The configurations and repetition scheme for a whole experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixSpec {
    pub configs: Vec<LearningConfig>,
    pub repetitions: usize,
    pub master_seed: u64,
    pub realistic_files: usize,
}

/// Every (pool, config) cell, sorted by (rule, size, ratio, repetition).
pub fn run_matrix(
    matrix: &MatrixSpec,
    pools: &[ExamplePool],
    view: &CorpusView<'_>,
    index: &ViolationIndex,
    backend: &dyn Backend,
) -> Result<Vec<RunResult>> {
    let cells: Vec<(&ExamplePool, LearningConfig)> = pools
        .iter()
        .flat_map(|p| matrix.configs.iter().map(move |&c| (p, c)))
        .collect();
    let nested: Vec<Vec<RunResult>> = cells
        .par_iter()
        .map(|&(pool, config)| {
            let spec = RunSpec {
                rule: pool.rule,
                config,
                repetitions: matrix.repetitions,
                master_seed: matrix.master_seed,
                realistic_files: matrix.realistic_files,
            };
            log::info!("running {} {} x{}", pool.rule, config, matrix.repetitions);
            run_experiment(&spec, pool, view, index, backend)
        })
        .collect::<Result<_>>()?;
    let mut results: Vec<RunResult> = nested.into_iter().flatten().collect();
    results.sort_by_key(RunResult::sort_key);
    Ok(results)
}

/// Write results as JSON Lines, sorted by (rule, size, ratio, repetition).
pub fn write_results(path: &Path, results: &[RunResult]) -> Result<()> {
    let mut sorted: Vec<&RunResult> = results.iter().collect();
    sorted.sort_by_key(|r| r.sort_key());
    jsonl::write(path, sorted)
}

pub fn read_results(path: &Path) -> Result<Vec<RunResult>> {
    let results: Vec<RunResult> = jsonl::read(path)?;
    if let Some(r) = results
        .iter()
        .find(|r| r.schema_version != RESULTS_SCHEMA_VERSION)
    {
        return Err(Error::Format {
            path: path.to_path_buf(),
            line: 0,
            message: format!("unsupported results schema version {}", r.schema_version),
        });
    }
    Ok(results)
}

/// Training origins and realistic files never overlap; exposed for tests
/// and sanity checks.
pub fn realistic_files_disjoint(ts: &TrainingSet, test: &TestSet) -> bool {
    let used: BTreeSet<FileId> = ts.origin_files();
    test.files.iter().all(|f| !used.contains(f))
}
