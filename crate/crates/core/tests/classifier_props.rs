use std::collections::BTreeSet;

use mlinter_core::classifier::{
    featurize, objective, train, train_with_trace, ClassifierConfig, FeatureVector,
    TrainedClassifier,
};
use mlinter_core::dataset::{
    Example, ExampleKind, LearningConfig, Origin, Ratio, TrainingSet, TrainingSize,
};
use mlinter_core::oracle::RuleId;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VIOLATIONS: &[&str] = &[
    "if (a == b) {",
    "return x != null;",
    "const ok = n == 0;",
    "while (i != n) {",
    "x = y == z ? 1 : 2;",
    "if (typeof v == \"string\") {",
];
const COMPLIANT: &[&str] = &[
    "if (a === b) {",
    "return x !== null;",
    "const ok = n === 0;",
    "while (i !== n) {",
    "let total = 0;",
    "items.push(item);",
    "}",
    "// done",
];

fn training_set() -> TrainingSet {
    let mut examples = Vec::new();
    for (i, t) in VIOLATIONS.iter().enumerate() {
        let origin = Origin {
            file_id: 0,
            line_no: i as u32 + 1,
        };
        examples.push(Example::new(ExampleKind::Violation, *t, origin));
    }
    for (i, t) in COMPLIANT.iter().enumerate() {
        let origin = Origin {
            file_id: 1,
            line_no: i as u32 + 1,
        };
        examples.push(Example::new(ExampleKind::Extant, *t, origin));
    }
    let drawn_instances: BTreeSet<_> = examples.iter().map(Example::key).collect();
    TrainingSet {
        rule: RuleId::Eqeqeq,
        config: LearningConfig::new(TrainingSize::Custom(examples.len()), Ratio::VE),
        examples,
        drawn_instances,
    }
}

fn data(ts: &TrainingSet, config: &ClassifierConfig) -> Vec<(FeatureVector, f64)> {
    ts.examples
        .iter()
        .map(|e| {
            (
                featurize(&e.text, config),
                if e.label.is_positive() { 1.0 } else { 0.0 },
            )
        })
        .collect()
}

#[test]
fn gradient_matches_central_differences() {
    let config = ClassifierConfig {
        feature_dims: 1 << 10,
        ..ClassifierConfig::default()
    };
    let ts = training_set();
    let data = data(&ts, &config);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let weights: Vec<f64> = (0..config.feature_dims)
        .map(|_| rng.gen_range(-0.5..0.5))
        .collect();
    let bias = 0.3;
    let l2 = 0.01;
    let (_, grad, grad_bias) = objective(&weights, bias, &data, l2);

    let h = 1e-5;
    let close = |analytic: f64, numeric: f64| {
        (analytic - numeric).abs() <= 1e-4 * analytic.abs().max(numeric.abs()).max(1e-3)
    };
    // touched coordinates plus random ones
    let mut coords: Vec<usize> = data
        .iter()
        .flat_map(|(x, _)| x.entries().iter().map(|e| e.0 as usize))
        .collect();
    coords.sort_unstable();
    coords.dedup();
    coords.truncate(70);
    coords.extend((0..30).map(|_| rng.gen_range(0..config.feature_dims)));
    for &i in &coords {
        let mut plus = weights.clone();
        plus[i] += h;
        let mut minus = weights.clone();
        minus[i] -= h;
        let numeric = (objective(&plus, bias, &data, l2).0 - objective(&minus, bias, &data, l2).0)
            / (2.0 * h);
        assert!(
            close(grad[i], numeric),
            "coordinate {i}: {} vs {numeric}",
            grad[i]
        );
    }
    let numeric = (objective(&weights, bias + h, &data, l2).0
        - objective(&weights, bias - h, &data, l2).0)
        / (2.0 * h);
    assert!(close(grad_bias, numeric), "bias: {grad_bias} vs {numeric}");
}

#[test]
fn full_batch_descent_never_increases_the_loss() {
    let ts = training_set();
    let base = ClassifierConfig {
        feature_dims: 1 << 12,
        ..ClassifierConfig::default()
    };
    let max_norm = data(&ts, &base)
        .iter()
        .map(|(x, _)| x.squared_norm())
        .fold(0.0, f64::max);
    let l2 = 1e-3;
    // step below 1/L for the logistic loss plus the bias and l2 terms
    let lr = 1.0 / ((max_norm + 1.0) / 4.0 + l2);
    let config = ClassifierConfig {
        epochs: 50,
        learning_rate: lr,
        l2,
        batch_size: ts.examples.len(),
        shuffle: false,
        ..base
    };
    let (_, trace) = train_with_trace(&ts, &config).unwrap();
    assert_eq!(trace.len(), 51);
    for w in trace.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "loss went up: {} -> {}", w[0], w[1]);
    }
    assert!(trace[50] < trace[0]);
}

#[test]
fn training_separates_the_toy_set_and_round_trips_through_json() {
    let ts = training_set();
    let config = ClassifierConfig {
        epochs: 30,
        ..ClassifierConfig::default()
    };
    let model = train(&ts, &config).unwrap();
    for e in &ts.examples {
        assert_eq!(model.predict(&e.text).label, e.label, "{}", e.text);
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    model.save_json(&path).unwrap();
    let loaded = TrainedClassifier::load_json(&path).unwrap();
    assert_eq!(loaded, model);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn features_ignore_whitespace_and_comments(line in "[a-z =;().]{0,40}") {
        let config = ClassifierConfig::default();
        let spaced = line.replace(' ', "   ");
        prop_assert_eq!(featurize(&line, &config), featurize(&format!("{spaced} // note"), &config));
    }

    #[test]
    fn training_is_deterministic_per_seed(seed in any::<u64>()) {
        let ts = training_set();
        let config = ClassifierConfig { feature_dims: 1 << 10, seed, ..ClassifierConfig::default() };
        prop_assert_eq!(train(&ts, &config).unwrap(), train(&ts, &config).unwrap());
    }

    #[test]
    fn scores_are_probabilities(line in "[ -~]{0,60}") {
        let model = train(&training_set(), &ClassifierConfig { feature_dims: 1 << 10, ..ClassifierConfig::default() }).unwrap();
        let p = model.predict(&line);
        prop_assert!((0.0..=1.0).contains(&p.score));
    }
}
