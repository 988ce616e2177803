//! Layout of the shared work directory and the run manifests.
//!
//! ```text
//! <dir>/corpus.jsonl          ingest
//! <dir>/threshold.json        threshold
//! <dir>/violations.jsonl      analyze
//! <dir>/analysis.json         analyze (rules, line filter, counts)
//! <dir>/pools/<rule>.jsonl    dataset
//! <dir>/pools.json            dataset (built and excluded rules)
//! <dir>/models/<rule>.json    train
//! <dir>/results.jsonl         experiment
//! <dir>/report/               stats
//! <dir>/manifests/<cmd>.json  every command
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mlinter_core::corpus::CorpusStore;
use mlinter_core::oracle::RuleId;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub struct WorkDir {
    root: PathBuf,
}

impl WorkDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn corpus(&self) -> PathBuf {
        self.root.join("corpus.jsonl")
    }

    pub fn threshold(&self) -> PathBuf {
        self.root.join("threshold.json")
    }

    pub fn violations(&self) -> PathBuf {
        self.root.join("violations.jsonl")
    }

    pub fn analysis(&self) -> PathBuf {
        self.root.join("analysis.json")
    }

    pub fn pools_index(&self) -> PathBuf {
        self.root.join("pools.json")
    }

    pub fn pool(&self, rule: RuleId) -> PathBuf {
        self.root.join("pools").join(format!("{rule}.jsonl"))
    }

    pub fn model(&self, rule: RuleId) -> PathBuf {
        self.root.join("models").join(format!("{rule}.json"))
    }

    pub fn results(&self) -> PathBuf {
        self.root.join("results.jsonl")
    }

    pub fn report(&self) -> PathBuf {
        self.root.join("report")
    }

    pub fn manifest(&self, command: &str) -> PathBuf {
        self.root.join("manifests").join(format!("{command}.json"))
    }

    pub fn load_corpus(&self) -> Result<CorpusStore> {
        let path = require(&self.corpus())?;
        let store = CorpusStore::load_jsonl(&path)?;
        if store.is_empty() {
            bail!("corpus {} has no lines", path.display());
        }
        Ok(store)
    }
}

/// Fail with the missing file's name when an upstream artifact is absent.
pub fn require(path: &Path) -> Result<PathBuf> {
    if !path.exists() {
        bail!("missing input file {}", path.display());
    }
    Ok(path.to_path_buf())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let path = require(path)?;
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn file_digest(path: &Path) -> Result<Option<String>> {
    if !path.exists() {
        return Ok(None);
    }
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Some(sha256_hex(&bytes)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timestamps {
    pub started: String,
    pub finished: String,
}

/// What a command ran with; enough to rerun it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub master_seed: u64,
    /// SHA-256 of the resolved settings as canonical JSON.
    pub config_digest: String,
    /// SHA-256 of `corpus.jsonl`, if it exists.
    pub corpus_digest: Option<String>,
    pub settings: serde_json::Value,
    pub timestamps: Timestamps,
}

impl RunManifest {
    pub fn new(
        command: &str,
        seed: u64,
        settings: serde_json::Value,
        corpus: &Path,
        started: String,
    ) -> Result<Self> {
        let canonical = serde_json::to_vec(&settings)?;
        Ok(Self {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed: seed,
            config_digest: sha256_hex(&canonical),
            corpus_digest: file_digest(corpus)?,
            settings,
            timestamps: Timestamps {
                started,
                finished: now(),
            },
        })
    }
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}
