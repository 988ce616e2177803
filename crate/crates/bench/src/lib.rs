//! Inputs shared by the benchmarks.

use mlinter_core::corpus::{analyze, CorpusStore};
use mlinter_core::dataset::{build_pools, sample_training_set, LearningConfig};
use mlinter_core::oracle::RuleId;
use mlinter_core::synth::{generate, SynthConfig};
use mlinter_core::{Ratio, TrainingSet, TrainingSize};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A small synthetic corpus with planted violations of every rule.
pub fn corpus(files: usize, lines_per_file: usize) -> CorpusStore {
    let config = SynthConfig {
        projects: 4,
        files,
        lines_per_file,
        violation_rate: 0.02,
        rules: RuleId::ALL.to_vec(),
        seed: 1,
    };
    generate(&config).expect("valid synth config").to_store()
}

/// Every line of `store`, in order.
pub fn lines(store: &CorpusStore) -> Vec<String> {
    store.lines().iter().map(|l| l.text.clone()).collect()
}

/// An eqeqeq training set of the given size drawn from `store`.
pub fn training_set(store: &CorpusStore, size: TrainingSize) -> TrainingSet {
    let view = store.view();
    let rules = [RuleId::Eqeqeq];
    let index = analyze(&view, &rules).expect("analysis");
    let pools = build_pools(&index, &view, &rules, 1).expect("pools");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    sample_training_set(
        &pools.pools[0],
        LearningConfig::new(size, Ratio::VFE),
        &mut rng,
    )
    .expect("enough instances")
}
