//! Line-level JavaScript linting practices learned from examples.
//!
//! The pipeline runs: [`corpus`] ingestion and filtering, the rule
//! [`oracle`], [`dataset`] pools and sampled training sets, a
//! [`classifier`] backend, the [`experiment`] bootstrap harness, and
//! [`stats`] over the collected results.

pub mod classifier;
pub mod corpus;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod fixture;
pub mod jsonl;
pub mod lexer;
pub mod lint;
pub mod numeric;
pub mod oracle;
pub mod stats;
pub mod synth;

pub use classifier::{Backend, ClassifierConfig, LineClassifier, LinearBackend, TrainedClassifier};
pub use corpus::{CorpusStore, CorpusView, FileId, LineRef, ViolationIndex};
pub use dataset::{
    ExampleKind, ExamplePool, Label, LearningConfig, Ratio, TrainingSet, TrainingSize,
};
pub use error::{Error, Result};
pub use experiment::{Metrics, RunResult, RunSpec};
pub use oracle::{Finding, RuleId, Span};
