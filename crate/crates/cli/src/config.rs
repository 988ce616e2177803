//! TOML run configuration. Every table mirrors the flags of one command;
//! a flag given on the command line wins over the file.
//!
//! ```toml
//! seed = 7
//! jobs = 4
//!
//! [threshold]
//! confidence = 0.95
//! precision = 0.05
//! quantile = 0.99
//!
//! [analyze]
//! rules = "all"
//!
//! [dataset]
//! min_examples = 1000
//!
//! [experiment]
//! rules = "eqeqeq,semi"
//! sizes = "S,M,L"
//! ratios = "VF,VE,VFE"
//! reps = 100
//! realistic_files = 5
//!
//! [classifier]
//! epochs = 10
//! learning_rate = 0.1
//! ```

use std::path::Path;

use anyhow::{Context, Result};
use mlinter_core::classifier::ClassifierConfig;
use serde::{Deserialize, Serialize};

pub const SEED_ENV: &str = "MLINTER_SEED";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    #[serde(default)]
    pub ingest: IngestSection,
    #[serde(default)]
    pub threshold: ThresholdSection,
    #[serde(default)]
    pub analyze: AnalyzeSection,
    #[serde(default)]
    pub dataset: DatasetSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
    pub classifier: Option<ClassifierConfig>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestSection {
    pub roots: Option<Vec<String>>,
    pub manifest: Option<String>,
    pub exclude_suffixes: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSection {
    pub confidence: Option<f64>,
    pub precision: Option<f64>,
    pub quantile: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeSection {
    pub rules: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    pub min_examples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub rules: Option<String>,
    pub size: Option<String>,
    pub ratio: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub rules: Option<String>,
    pub sizes: Option<String>,
    pub ratios: Option<String>,
    pub reps: Option<usize>,
    pub realistic_files: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Flag, then config file, then `MLINTER_SEED`, then 0.
    pub fn seed(&self, flag: Option<u64>) -> Result<u64> {
        if let Some(s) = flag.or(self.seed) {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .with_context(|| format!("{SEED_ENV}={v:?} is not an unsigned integer")),
            Err(_) => Ok(0),
        }
    }

    pub fn classifier(&self) -> ClassifierConfig {
        self.classifier.clone().unwrap_or_default()
    }
}
