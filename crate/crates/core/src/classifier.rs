//! Per-rule binary line classifiers.
//!
//! The built-in backend is a logistic-regression model over hashed token
//! n-grams. Experiments only see the [`Backend`] / [`LineClassifier`]
//! traits, so other learners (a fine-tuned transformer, for instance) can
//! be plugged in without touching the harness.
//!
//! # Features
//!
//! A line is tokenized and whitespace/comment tokens are dropped. The
//! remaining tokens are framed by begin/end markers and, for each order
//! `n` in `token_ngram_orders`, every window of `n` tokens becomes one
//! feature keyed by its `kind:text` pairs. With `include_kind_ngrams` each
//! window also yields a feature keyed by the token kinds alone. Unigrams of
//! the markers themselves are skipped, and a line with no tokens has no
//! features.
//!
//! A feature key is hashed with 64-bit FNV-1a over the byte string
//! `"t" | "k"`, the order as a decimal, `0x1F`, then each element followed
//! by `0x1E`, where an element is `kind:text` (`t`) or `kind` (`k`). The
//! hash modulo `feature_dims` is the feature index, and values are term
//! counts.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Label, TrainingSet};
use crate::error::{Error, Result};
use crate::lexer::{tokenize, TokenKind};
use crate::oracle::RuleId;

pub const MODEL_FORMAT: &str = "mlinter-linear";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    pub feature_dims: usize,
    pub token_ngram_orders: Vec<usize>,
    pub include_kind_ngrams: bool,
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub decision_threshold: f64,
    /// Examples per gradient step; 1 is plain SGD.
    pub batch_size: usize,
    /// Reshuffle the examples every epoch.
    pub shuffle: bool,
    pub seed: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            feature_dims: 1 << 18,
            token_ngram_orders: vec![1, 2, 3],
            include_kind_ngrams: true,
            epochs: 10,
            learning_rate: 0.1,
            l2: 1e-4,
            decision_threshold: 0.5,
            batch_size: 1,
            shuffle: true,
            seed: 0,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        if self.feature_dims < 2 || !self.feature_dims.is_power_of_two() {
            return Err(Error::invalid("feature_dims must be a power of two >= 2"));
        }
        if self.feature_dims > u32::MAX as usize {
            return Err(Error::invalid("feature_dims too large"));
        }
        if self.token_ngram_orders.is_empty() || self.token_ngram_orders.contains(&0) {
            return Err(Error::invalid("n-gram orders must be positive"));
        }
        if self.epochs == 0 {
            return Err(Error::invalid("epochs must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size must be at least 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning_rate must be positive"));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return Err(Error::invalid("l2 must be non-negative"));
        }
        if !(self.decision_threshold > 0.0 && self.decision_threshold < 1.0) {
            return Err(Error::invalid("decision_threshold must be in (0, 1)"));
        }
        Ok(())
    }
}

/// Sparse term counts, sorted by index with no duplicates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureVector {
    entries: Vec<(u32, f64)>,
}

impl FeatureVector {
    fn from_indices(mut indices: Vec<u32>) -> Self {
        indices.sort_unstable();
        let mut entries: Vec<(u32, f64)> = Vec::with_capacity(indices.len());
        for i in indices {
            match entries.last_mut() {
                Some((j, w)) if *j == i => *w += 1.0,
                _ => entries.push((i, 1.0)),
            }
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn get(&self, index: u32) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map_or(0.0, |pos| self.entries[pos].1)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(i, v)| weights[i as usize] * v)
            .sum()
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum()
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn feed(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
}

const BOS: (&str, &str) = ("Begin", "<s>");
const EOS: (&str, &str) = ("End", "</s>");

pub fn featurize(line: &str, config: &ClassifierConfig) -> FeatureVector {
    let tokens = tokenize(line);
    let mut seq: Vec<(&str, &str)> = Vec::with_capacity(tokens.len() + 2);
    seq.push(BOS);
    seq.extend(
        tokens
            .iter()
            .filter(|t| !t.kind.is_trivia())
            .map(|t| (t.kind.as_str(), t.text.as_str())),
    );
    if seq.len() == 1 {
        return FeatureVector::default();
    }
    seq.push(EOS);

    let dims = config.feature_dims as u64;
    let mut indices = Vec::new();
    for &n in &config.token_ngram_orders {
        if n > seq.len() {
            continue;
        }
        for window in seq.windows(n) {
            if n == 1 && (window[0] == BOS || window[0] == EOS) {
                continue;
            }
            let mut h = Fnv::new();
            h.feed(b"t");
            h.feed(n.to_string().as_bytes());
            h.feed(&[0x1f]);
            for (kind, text) in window {
                h.feed(kind.as_bytes());
                h.feed(b":");
                h.feed(text.as_bytes());
                h.feed(&[0x1e]);
            }
            indices.push((h.0 % dims) as u32);

            if config.include_kind_ngrams {
                let mut h = Fnv::new();
                h.feed(b"k");
                h.feed(n.to_string().as_bytes());
                h.feed(&[0x1f]);
                for (kind, _) in window {
                    h.feed(kind.as_bytes());
                    h.feed(&[0x1e]);
                }
                indices.push((h.0 % dims) as u32);
            }
        }
    }
    FeatureVector::from_indices(indices)
}

/// Index of the `kind:text` unigram feature.
pub fn unigram_index(kind: TokenKind, text: &str, config: &ClassifierConfig) -> u32 {
    let mut h = Fnv::new();
    h.feed(b"t1");
    h.feed(&[0x1f]);
    h.feed(kind.as_str().as_bytes());
    h.feed(b":");
    h.feed(text.as_bytes());
    h.feed(&[0x1e]);
    (h.0 % config.feature_dims as u64) as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    /// Probability of non-compliance.
    pub score: f64,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedClassifier {
    pub format: String,
    pub version: u32,
    pub rule: RuleId,
    pub config: ClassifierConfig,
    pub bias: f64,
    pub weights: Vec<f64>,
}

impl TrainedClassifier {
    /// All-zero model; scores every line 0.5.
    pub fn zeroed(rule: RuleId, config: ClassifierConfig) -> Self {
        TrainedClassifier {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            rule,
            weights: vec![0.0; config.feature_dims],
            bias: 0.0,
            config,
        }
    }

    pub fn score_features(&self, x: &FeatureVector) -> f64 {
        sigmoid(x.dot(&self.weights) + self.bias)
    }

    pub fn predict(&self, line: &str) -> Prediction {
        let score = self.score_features(&featurize(line, &self.config));
        let label = if score >= self.config.decision_threshold {
            Label::NonCompliant
        } else {
            Label::Compliant
        };
        Prediction { label, score }
    }

    pub fn is_finite(&self) -> bool {
        self.bias.is_finite() && self.weights.iter().all(|w| w.is_finite())
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_vec(self).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            line: 0,
            message: e.to_string(),
        })?;
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let bad = |message: String| Error::Format {
            path: path.to_path_buf(),
            line: 1,
            message,
        };
        let model: TrainedClassifier =
            serde_json::from_slice(&bytes).map_err(|e| bad(e.to_string()))?;
        if model.format != MODEL_FORMAT || model.version != MODEL_VERSION {
            return Err(bad(format!(
                "unsupported model format {} v{}",
                model.format, model.version
            )));
        }
        if model.weights.len() != model.config.feature_dims {
            return Err(bad(
                "weight vector length does not match feature_dims".into()
            ));
        }
        if !model.is_finite() {
            return Err(bad("model has non-finite weights".into()));
        }
        Ok(model)
    }
}

/// Regularized mean logistic loss `mean(softplus(z) − y·z) + l2/2·|w|²` and
/// its gradient with respect to the weights and the bias.
pub fn objective(
    weights: &[f64],
    bias: f64,
    data: &[(FeatureVector, f64)],
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = data.len() as f64;
    let mut loss = 0.0;
    let mut grad: Vec<f64> = weights.iter().map(|w| l2 * w).collect();
    let mut grad_bias = 0.0;
    for (x, y) in data {
        let z = x.dot(weights) + bias;
        loss += softplus(z) - y * z;
        let g = (sigmoid(z) - y) / n;
        for &(i, v) in x.entries() {
            grad[i as usize] += g * v;
        }
        grad_bias += g;
    }
    let reg = 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>();
    (loss / n + reg, grad, grad_bias)
}

fn regularized_loss(weights: &[f64], bias: f64, data: &[(FeatureVector, f64)], l2: f64) -> f64 {
    let n = data.len() as f64;
    let data_loss: f64 = data
        .iter()
        .map(|(x, y)| {
            let z = x.dot(weights) + bias;
            softplus(z) - y * z
        })
        .sum();
    data_loss / n + 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>()
}

pub fn train(ts: &TrainingSet, config: &ClassifierConfig) -> Result<TrainedClassifier> {
    train_with_trace(ts, config).map(|(model, _)| model)
}

/// Train and also return the objective before training and after each epoch.
pub fn train_with_trace(
    ts: &TrainingSet,
    config: &ClassifierConfig,
) -> Result<(TrainedClassifier, Vec<f64>)> {
    config.validate()?;
    if ts.examples.is_empty() {
        return Err(Error::invalid("training set is empty"));
    }
    if !ts.has_both_labels() {
        return Err(Error::SingleLabel);
    }
    let data: Vec<(FeatureVector, f64)> = ts
        .examples
        .iter()
        .map(|e| {
            let y = if e.label.is_positive() { 1.0 } else { 0.0 };
            (featurize(&e.text, config), y)
        })
        .collect();

    // w = scale * v, so the l2 shrink is O(1) per step
    let mut v = vec![0.0; config.feature_dims];
    let mut scale = 1.0;
    let mut bias = 0.0;
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let lr = config.learning_rate;
    let decay = 1.0 - lr * config.l2;
    if decay <= 0.0 {
        return Err(Error::invalid("learning_rate * l2 must be below 1"));
    }

    let mut trace = vec![regularized_loss(&v, bias, &data, config.l2)];
    let mut gradients: Vec<f64> = Vec::with_capacity(config.batch_size);
    for _ in 0..config.epochs {
        if config.shuffle {
            order.shuffle(&mut rng);
        }
        for batch in order.chunks(config.batch_size) {
            let b = batch.len() as f64;
            gradients.clear();
            gradients.extend(batch.iter().map(|&i| {
                let (x, y) = &data[i];
                sigmoid(scale * x.dot(&v) + bias) - y
            }));
            scale *= decay;
            for (&i, &g) in batch.iter().zip(&gradients) {
                let step = lr * g / b;
                for &(j, value) in data[i].0.entries() {
                    v[j as usize] -= step * value / scale;
                }
            }
            bias -= lr * gradients.iter().sum::<f64>() / b;
            if scale < 1e-9 {
                v.iter_mut().for_each(|w| *w *= scale);
                scale = 1.0;
            }
        }
        let w: Vec<f64> = v.iter().map(|x| x * scale).collect();
        trace.push(regularized_loss(&w, bias, &data, config.l2));
    }
    let weights: Vec<f64> = v.into_iter().map(|x| x * scale).collect();
    let model = TrainedClassifier {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        rule: ts.rule,
        config: config.clone(),
        bias,
        weights,
    };
    if !model.is_finite() {
        return Err(Error::invalid("training diverged to non-finite weights"));
    }
    Ok((model, trace))
}

/// A trained per-rule line classifier, whatever the learner behind it.
pub trait LineClassifier: Send + Sync {
    fn rule(&self) -> RuleId;
    fn predict(&self, line: &str) -> Prediction;
}

impl LineClassifier for TrainedClassifier {
    fn rule(&self) -> RuleId {
        self.rule
    }

    fn predict(&self, line: &str) -> Prediction {
        TrainedClassifier::predict(self, line)
    }
}

/// Something that turns a training set into a classifier.
pub trait Backend: Sync {
    fn name(&self) -> &str;
    fn train(&self, ts: &TrainingSet, seed: u64) -> Result<Box<dyn LineClassifier>>;
}

/// Hashed n-gram logistic regression.
#[derive(Debug, Clone, Default)]
pub struct LinearBackend {
    pub config: ClassifierConfig,
}

impl LinearBackend {
    pub fn new(config: ClassifierConfig) -> Self {
        Self { config }
    }
}

impl Backend for LinearBackend {
    fn name(&self) -> &str {
        "linear"
    }

    fn train(&self, ts: &TrainingSet, seed: u64) -> Result<Box<dyn LineClassifier>> {
        let config = ClassifierConfig {
            seed,
            ..self.config.clone()
        };
        Ok(Box::new(train(ts, &config)?))
    }
}

/// Predicts the same label for every line; a harness test double.
#[derive(Debug, Clone, Copy)]
pub struct ConstantBackend {
    pub label: Label,
}

struct ConstantClassifier {
    rule: RuleId,
    label: Label,
}

impl LineClassifier for ConstantClassifier {
    fn rule(&self) -> RuleId {
        self.rule
    }

    fn predict(&self, _line: &str) -> Prediction {
        let score = if self.label.is_positive() { 1.0 } else { 0.0 };
        Prediction {
            label: self.label,
            score,
        }
    }
}

impl Backend for ConstantBackend {
    fn name(&self) -> &str {
        "constant"
    }

    fn train(&self, ts: &TrainingSet, _seed: u64) -> Result<Box<dyn LineClassifier>> {
        Ok(Box::new(ConstantClassifier {
            rule: ts.rule,
            label: self.label,
        }))
    }
}
