//! Line-level corpus: ingestion of local project trees, the line-length
//! threshold, and the violation index built by running the oracle.
//!
//! Persisted formats (JSON Lines):
//!
//! - corpus: `{file_id, project, path, sha, line_no, text}` per line;
//! - violations: `{rule, file_id, line_no, start_col, end_col, fixed_text}`
//!   per finding.
//!
//! The clone manifest is a JSON array of `{url, commit_sha, local_path}`.
//! Ingestion never touches the network; the manifest only records where a
//! local checkout came from.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use log::{debug, warn};
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::jsonl;
use crate::lexer::tokenize;
use crate::numeric::{ceil_snapped, nearest_rank};
use crate::oracle::{apply_edits, check_tokens, RuleId, Span};

pub type FileId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    pub file_id: FileId,
    pub project: String,
    pub path: String,
    pub commit_sha: Option<String>,
    pub line_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceLine {
    pub file_id: FileId,
    /// 1-based.
    pub line_no: u32,
    pub text: String,
    /// Unicode scalar count of `text`.
    pub length: usize,
}

impl SourceLine {
    pub fn key(&self) -> LineRef {
        LineRef {
            file_id: self.file_id,
            line_no: self.line_no,
        }
    }
}

/// Identity of a line instance; duplicated texts stay distinct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LineRef {
    pub file_id: FileId,
    pub line_no: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloneManifestEntry {
    pub url: String,
    pub commit_sha: String,
    pub local_path: PathBuf,
}

/// Read a clone manifest; relative `local_path`s resolve against the
/// manifest's own directory.
pub fn load_manifest(path: &Path) -> Result<Vec<CloneManifestEntry>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut entries: Vec<CloneManifestEntry> =
        serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
    let base = path.parent().unwrap_or(Path::new("."));
    for entry in &mut entries {
        if entry.local_path.is_relative() {
            entry.local_path = base.join(&entry.local_path);
        }
    }
    Ok(entries)
}

#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub roots: Vec<PathBuf>,
    pub manifest: Vec<CloneManifestEntry>,
    pub extensions: Vec<String>,
    pub exclude_suffixes: Vec<String>,
}

impl IngestOptions {
    pub fn new(roots: Vec<PathBuf>) -> Self {
        Self {
            roots,
            manifest: Vec::new(),
            extensions: vec![".js".into()],
            exclude_suffixes: vec![".min.js".into()],
        }
    }

    fn accepts(&self, name: &str) -> bool {
        self.extensions.iter().any(|e| name.ends_with(e.as_str()))
            && !self
                .exclude_suffixes
                .iter()
                .any(|s| name.ends_with(s.as_str()))
    }
}

#[derive(Debug, Clone, Default)]
pub struct CorpusStore {
    files: Vec<FileRecord>,
    lines: Vec<SourceLine>,
    /// Index into `lines` of each file's first line.
    offsets: Vec<usize>,
}

impl CorpusStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append a file; returns its id.
    pub fn add_file(
        &mut self,
        project: impl Into<String>,
        path: impl Into<String>,
        commit_sha: Option<String>,
        content: &str,
    ) -> FileId {
        let file_id = self.files.len() as FileId;
        self.offsets.push(self.lines.len());
        let mut line_count = 0;
        for (i, text) in content.lines().enumerate() {
            self.lines.push(SourceLine {
                file_id,
                line_no: i as u32 + 1,
                length: text.chars().count(),
                text: text.to_string(),
            });
            line_count += 1;
        }
        self.files.push(FileRecord {
            file_id,
            project: project.into(),
            path: path.into(),
            commit_sha,
            line_count,
        });
        file_id
    }

    pub fn files(&self) -> &[FileRecord] {
        &self.files
    }

    pub fn lines(&self) -> &[SourceLine] {
        &self.lines
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    pub fn file(&self, id: FileId) -> Option<&FileRecord> {
        self.files.get(id as usize)
    }

    pub fn file_lines(&self, id: FileId) -> &[SourceLine] {
        let Some(file) = self.file(id) else {
            return &[];
        };
        let start = self.offsets[id as usize];
        &self.lines[start..start + file.line_count]
    }

    pub fn line(&self, key: LineRef) -> Option<&SourceLine> {
        let lines = self.file_lines(key.file_id);
        key.line_no
            .checked_sub(1)
            .and_then(|i| lines.get(i as usize))
    }

    /// Position of a line in [`CorpusStore::lines`].
    pub fn position(&self, key: LineRef) -> Option<usize> {
        self.line(key)
            .map(|_| self.offsets[key.file_id as usize] + key.line_no as usize - 1)
    }

    /// Unfiltered view of every line.
    pub fn view(&self) -> CorpusView<'_> {
        CorpusView {
            store: self,
            max_len: None,
            indices: (0..self.lines.len()).collect(),
        }
    }

    pub fn save_jsonl(&self, path: &Path) -> Result<()> {
        jsonl::write(
            path,
            self.lines.iter().map(|l| {
                let file = &self.files[l.file_id as usize];
                LineRecord {
                    file_id: l.file_id,
                    project: file.project.clone(),
                    path: file.path.clone(),
                    sha: file.commit_sha.clone(),
                    line_no: l.line_no,
                    text: l.text.clone(),
                }
            }),
        )
    }

    /// Rebuild a store from its JSON Lines form. Files with no lines are
    /// not represented in that format.
    pub fn load_jsonl(path: &Path) -> Result<Self> {
        let records: Vec<LineRecord> = jsonl::read(path)?;
        let mut store = CorpusStore::new();
        for (i, r) in records.into_iter().enumerate() {
            let bad = |message: String| Error::Format {
                path: path.to_path_buf(),
                line: i + 1,
                message,
            };
            if store.files.last().map(|f| f.file_id) != Some(r.file_id) {
                if (r.file_id as usize) < store.files.len() {
                    return Err(bad(format!("unexpected file_id {}", r.file_id)));
                }
                // ids of files without lines leave gaps
                while store.files.len() < r.file_id as usize {
                    let file_id = store.files.len() as FileId;
                    store.offsets.push(store.lines.len());
                    store.files.push(FileRecord {
                        file_id,
                        project: String::new(),
                        path: String::new(),
                        commit_sha: None,
                        line_count: 0,
                    });
                }
                store.offsets.push(store.lines.len());
                store.files.push(FileRecord {
                    file_id: r.file_id,
                    project: r.project,
                    path: r.path,
                    commit_sha: r.sha,
                    line_count: 0,
                });
            }
            let file = store.files.last_mut().expect("file pushed above");
            if r.line_no as usize != file.line_count + 1 {
                return Err(bad(format!("unexpected line_no {}", r.line_no)));
            }
            file.line_count += 1;
            store.lines.push(SourceLine {
                file_id: r.file_id,
                line_no: r.line_no,
                length: r.text.chars().count(),
                text: r.text,
            });
        }
        Ok(store)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct LineRecord {
    file_id: FileId,
    project: String,
    path: String,
    sha: Option<String>,
    line_no: u32,
    text: String,
}

/// Walk `roots` and collect every accepted file.
///
/// Each root is one project named after its directory, unless a manifest
/// entry's `local_path` contains the file, in which case that entry names
/// the project and supplies the commit SHA. Files that cannot be read or
/// are not UTF-8 are skipped with a warning.
pub fn ingest(options: &IngestOptions) -> Result<CorpusStore> {
    let manifest: Vec<(PathBuf, &CloneManifestEntry)> = options
        .manifest
        .iter()
        .map(|e| {
            (
                e.local_path
                    .canonicalize()
                    .unwrap_or_else(|_| e.local_path.clone()),
                e,
            )
        })
        .collect();

    let mut store = CorpusStore::new();
    for root in &options.roots {
        let root = root.canonicalize().map_err(|e| Error::io(root, e))?;
        if !root.is_dir() {
            return Err(Error::io(
                &root,
                std::io::Error::new(std::io::ErrorKind::NotADirectory, "not a directory"),
            ));
        }
        let walker = WalkDir::new(&root)
            .sort_by_file_name()
            .into_iter()
            .filter_entry(|e| e.depth() == 0 || e.file_name() != ".git");
        for entry in walker {
            let entry = match entry {
                Ok(entry) => entry,
                Err(e) => {
                    if e.depth() == 0 {
                        return Err(Error::io(
                            &root,
                            e.into_io_error()
                                .unwrap_or_else(|| std::io::Error::other("walk failed")),
                        ));
                    }
                    warn!("skipping unreadable entry: {e}");
                    continue;
                }
            };
            if !entry.file_type().is_file() {
                continue;
            }
            let name = entry.file_name().to_string_lossy();
            if !options.accepts(&name) {
                continue;
            }
            let path = entry.path();
            let bytes = match fs::read(path) {
                Ok(b) => b,
                Err(e) => {
                    warn!("skipping {}: {e}", path.display());
                    continue;
                }
            };
            let Ok(content) = String::from_utf8(bytes) else {
                warn!("skipping {}: not valid UTF-8", path.display());
                continue;
            };
            if content.lines().next().is_none() {
                debug!("skipping empty file {}", path.display());
                continue;
            }
            let owner = manifest
                .iter()
                .filter(|(dir, _)| path.starts_with(dir))
                .max_by_key(|(dir, _)| dir.components().count());
            let (project, base, sha) = match owner {
                Some((dir, e)) => (
                    project_name(dir, Some(&e.url)),
                    dir.as_path(),
                    Some(e.commit_sha.clone()),
                ),
                None => (project_name(&root, None), root.as_path(), None),
            };
            let rel = path.strip_prefix(base).unwrap_or(path);
            let rel = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            store.add_file(project, rel, sha, &content);
        }
    }
    Ok(store)
}

fn project_name(dir: &Path, url: Option<&str>) -> String {
    if let Some(name) = url
        .and_then(|u| u.trim_end_matches('/').rsplit('/').next())
        .map(|n| n.trim_end_matches(".git"))
        .filter(|n| !n.is_empty())
    {
        return name.to_string();
    }
    dir.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "root".into())
}

/// `ceil(z² · p · (1 − p) / e²)`.
pub fn cochran_sample_size(z: f64, e: f64, p: f64) -> Result<u64> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::invalid(format!("z must be positive, got {z}")));
    }
    if !(e > 0.0 && e <= 1.0) {
        return Err(Error::invalid(format!(
            "precision must be in (0, 1], got {e}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!(
            "proportion must be in [0, 1], got {p}"
        )));
    }
    Ok(ceil_snapped(z * z * p * (1.0 - p) / (e * e)) as u64)
}

/// Nearest-rank `q`-quantile of line lengths over `n_files` files drawn
/// uniformly without replacement.
pub fn compute_length_threshold<R: Rng + ?Sized>(
    store: &CorpusStore,
    n_files: usize,
    q: f64,
    rng: &mut R,
) -> Result<usize> {
    if store.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if n_files == 0 {
        return Err(Error::invalid("n_files must be at least 1"));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid(format!(
            "quantile must be in (0, 1), got {q}"
        )));
    }
    let total = store.files.len();
    let mut chosen = sample(rng, total, n_files.min(total)).into_vec();
    chosen.sort_unstable();
    let mut lengths: Vec<usize> = chosen
        .into_iter()
        .flat_map(|i| store.file_lines(i as FileId).iter().map(|l| l.length))
        .collect();
    lengths.sort_unstable();
    nearest_rank(&lengths, q).ok_or(Error::EmptyCorpus)
}

/// A length-filtered window onto a store.
#[derive(Debug, Clone)]
pub struct CorpusView<'a> {
    store: &'a CorpusStore,
    max_len: Option<usize>,
    indices: Vec<usize>,
}

impl<'a> CorpusView<'a> {
    pub fn store(&self) -> &'a CorpusStore {
        self.store
    }

    pub fn max_len(&self) -> Option<usize> {
        self.max_len
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn lines(&self) -> impl Iterator<Item = &'a SourceLine> + '_ {
        self.indices.iter().map(|&i| &self.store.lines[i])
    }

    pub fn admits(&self, line: &SourceLine) -> bool {
        self.max_len.is_none_or(|m| line.length <= m)
    }

    pub fn contains(&self, key: LineRef) -> bool {
        self.store.line(key).is_some_and(|l| self.admits(l))
    }

    /// Lines of one file that pass the filter.
    pub fn file_lines(&self, id: FileId) -> impl Iterator<Item = &'a SourceLine> + '_ {
        self.store
            .file_lines(id)
            .iter()
            .filter(move |l| self.admits(l))
    }

    /// Narrow the view to lines of at most `max_len` chars.
    pub fn filter(&self, max_len: usize) -> Result<CorpusView<'a>> {
        if max_len == 0 {
            return Err(Error::invalid("max_len must be at least 1"));
        }
        let store = self.store;
        Ok(CorpusView {
            store,
            max_len: Some(self.max_len.map_or(max_len, |m| m.min(max_len))),
            indices: self
                .indices
                .iter()
                .copied()
                .filter(|&i| store.lines[i].length <= max_len)
                .collect(),
        })
    }
}

/// Keep only lines with at most `max_len` chars (a line of exactly
/// `max_len` is kept).
pub fn filter_lines(store: &CorpusStore, max_len: usize) -> Result<CorpusView<'_>> {
    store.view().filter(max_len)
}

/// One non-compliant line: all its findings for a rule and the fully fixed text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub line: LineRef,
    pub spans: Vec<Span>,
    pub fixed_text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ViolationIndex {
    by_rule: BTreeMap<RuleId, Vec<Violation>>,
}

impl ViolationIndex {
    pub fn rules(&self) -> impl Iterator<Item = RuleId> + '_ {
        self.by_rule.keys().copied()
    }

    pub fn violations(&self, rule: RuleId) -> &[Violation] {
        self.by_rule.get(&rule).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, rule: RuleId) -> usize {
        self.violations(rule).len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_rule.values().all(Vec::is_empty)
    }

    /// Non-compliant line keys for `rule`.
    pub fn line_set(&self, rule: RuleId) -> BTreeSet<LineRef> {
        self.violations(rule).iter().map(|v| v.line).collect()
    }

    /// Files with at least one violation of `rule`, ascending.
    pub fn violating_files(&self, rule: RuleId) -> Vec<FileId> {
        let files: BTreeSet<FileId> = self
            .violations(rule)
            .iter()
            .map(|v| v.line.file_id)
            .collect();
        files.into_iter().collect()
    }

    pub fn save_jsonl(&self, path: &Path) -> Result<()> {
        jsonl::write(
            path,
            self.by_rule.iter().flat_map(|(&rule, vs)| {
                vs.iter().flat_map(move |v| {
                    v.spans.iter().map(move |s| ViolationRecord {
                        rule,
                        file_id: v.line.file_id,
                        line_no: v.line.line_no,
                        start_col: s.start,
                        end_col: s.end,
                        fixed_text: v.fixed_text.clone(),
                    })
                })
            }),
        )
    }

    /// Load an index; `rules` lists the rules that were analyzed so rules
    /// with no violations still appear.
    pub fn load_jsonl(path: &Path, rules: &[RuleId]) -> Result<Self> {
        let records: Vec<ViolationRecord> = jsonl::read(path)?;
        let mut by_rule: BTreeMap<RuleId, Vec<Violation>> =
            rules.iter().map(|&r| (r, Vec::new())).collect();
        for r in records {
            let line = LineRef {
                file_id: r.file_id,
                line_no: r.line_no,
            };
            let list = by_rule.entry(r.rule).or_default();
            let span = Span::new(r.start_col, r.end_col);
            match list.last_mut() {
                Some(v) if v.line == line => v.spans.push(span),
                _ => list.push(Violation {
                    line,
                    spans: vec![span],
                    fixed_text: r.fixed_text,
                }),
            }
        }
        Ok(Self { by_rule })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ViolationRecord {
    rule: RuleId,
    file_id: FileId,
    line_no: u32,
    start_col: usize,
    end_col: usize,
    fixed_text: String,
}

/// Run every rule over every line of the view.
pub fn analyze(view: &CorpusView<'_>, rules: &[RuleId]) -> Result<ViolationIndex> {
    if rules.is_empty() {
        return Err(Error::invalid("at least one rule is required"));
    }
    let lines: Vec<&SourceLine> = view.lines().collect();
    let per_line: Vec<Vec<(RuleId, Violation)>> = lines
        .par_iter()
        .map(|line| {
            let tokens = tokenize(&line.text);
            rules
                .iter()
                .filter_map(|&rule| {
                    let findings = check_tokens(rule, &tokens);
                    if findings.is_empty() {
                        return None;
                    }
                    let fixed_text = apply_edits(&line.text, findings.iter().map(|f| &f.fix));
                    Some((
                        rule,
                        Violation {
                            line: line.key(),
                            spans: findings.iter().map(|f| f.span).collect(),
                            fixed_text,
                        },
                    ))
                })
                .collect()
        })
        .collect();
    let mut by_rule: BTreeMap<RuleId, Vec<Violation>> =
        rules.iter().map(|&r| (r, Vec::new())).collect();
    for (rule, violation) in per_line.into_iter().flatten() {
        by_rule.entry(rule).or_default().push(violation);
    }
    Ok(ViolationIndex { by_rule })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleStats {
    pub violation_count: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub files: usize,
    pub lines: usize,
    pub per_rule: BTreeMap<RuleId, RuleStats>,
}

pub fn stats(store: &CorpusStore, view: &CorpusView<'_>, index: &ViolationIndex) -> CorpusStats {
    let lines = view.len();
    let per_rule = index
        .rules()
        .map(|rule| {
            let violation_count = index.count(rule);
            let ratio = if lines == 0 {
                0.0
            } else {
                violation_count as f64 / lines as f64
            };
            (
                rule,
                RuleStats {
                    violation_count,
                    ratio,
                },
            )
        })
        .collect();
    CorpusStats {
        files: store.files().len(),
        lines,
        per_rule,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn store_of(files: &[&str]) -> CorpusStore {
        let mut store = CorpusStore::new();
        for (i, content) in files.iter().enumerate() {
            store.add_file("p", format!("f{i}.js"), None, content);
        }
        store
    }

    #[test]
    fn cochran_examples() {
        assert_eq!(cochran_sample_size(1.96, 0.05, 0.5).unwrap(), 385);
        assert_eq!(cochran_sample_size(3.0, 0.2, 0.0).unwrap(), 0);
        assert_eq!(cochran_sample_size(2.576, 0.01, 0.5).unwrap(), 16590);
        assert!(cochran_sample_size(0.0, 0.05, 0.5).is_err());
        assert!(cochran_sample_size(1.96, 0.0, 0.5).is_err());
        assert!(cochran_sample_size(1.96, 0.05, 1.5).is_err());
    }

    #[test]
    fn threshold_on_constant_lengths() {
        let line = "x".repeat(40);
        let content = [line.as_str(); 10].join("\n");
        let store = store_of(&[&content, &content]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            compute_length_threshold(&store, 385, 0.99, &mut rng).unwrap(),
            40
        );
    }

    #[test]
    fn threshold_nearest_rank() {
        let lines: Vec<String> = (1..=100).map(|n| "y".repeat(n)).collect();
        let (a, b) = lines.split_at(37);
        let store = store_of(&[&a.join("\n"), &b.join("\n")]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(
            compute_length_threshold(&store, 5, 0.99, &mut rng).unwrap(),
            99
        );
    }

    #[test]
    fn threshold_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            compute_length_threshold(&CorpusStore::new(), 5, 0.99, &mut rng),
            Err(Error::EmptyCorpus)
        ));
        let store = store_of(&["a"]);
        assert!(compute_length_threshold(&store, 1, 1.0, &mut rng).is_err());
        assert!(compute_length_threshold(&store, 0, 0.5, &mut rng).is_err());
    }

    #[test]
    fn filter_boundary_is_inclusive() {
        let keep = "k".repeat(115);
        let drop = "d".repeat(116);
        let store = store_of(&[&format!("{keep}\n{drop}")]);
        let view = filter_lines(&store, 115).unwrap();
        let texts: Vec<_> = view.lines().map(|l| l.text.as_str()).collect();
        assert_eq!(texts, vec![keep.as_str()]);
        assert!(filter_lines(&store, 0).is_err());
        assert_eq!(
            filter_lines(&store, 500).unwrap().len(),
            store.lines().len()
        );
    }

    #[test]
    fn length_counts_chars_not_bytes() {
        let store = store_of(&["é€"]);
        assert_eq!(store.lines()[0].length, 2);
    }

    #[test]
    fn analyze_indexes_each_rule() {
        let store = store_of(&["a == b\nlet x = 1;\nvar y = a != b;"]);
        let view = store.view();
        let index = analyze(&view, &[RuleId::Eqeqeq, RuleId::NoVar]).unwrap();
        assert_eq!(index.count(RuleId::Eqeqeq), 2);
        assert_eq!(index.violations(RuleId::Eqeqeq)[0].fixed_text, "a === b");
        assert_eq!(index.count(RuleId::NoVar), 1);
        assert!(analyze(&view, &[]).is_err());

        let st = stats(&store, &view, &index);
        assert_eq!(st.lines, 3);
        assert_eq!(st.per_rule[&RuleId::NoVar].violation_count, 1);
    }

    #[test]
    fn compliant_corpus_has_empty_index() {
        let store = store_of(&["let x = 1;\nfoo();"]);
        let index = analyze(&store.view(), &RuleId::ALL).unwrap();
        assert!(index.is_empty());
        let st = stats(&store, &store.view(), &index);
        assert!(st.per_rule.values().all(|r| r.ratio == 0.0));
    }

    #[test]
    fn ratio_is_count_over_view_lines() {
        let mut content = vec!["x = 1;"; 99];
        content.push("x = 1;;");
        let store = store_of(&[&content.join("\n")]);
        let index = analyze(&store.view(), &[RuleId::NoExtraSemi]).unwrap();
        let st = stats(&store, &store.view(), &index);
        assert_eq!(st.per_rule[&RuleId::NoExtraSemi].ratio, 0.01);
    }

    #[test]
    fn store_lookup() {
        let store = store_of(&["a\nb", "c\nd\ne"]);
        let key = LineRef {
            file_id: 1,
            line_no: 3,
        };
        assert_eq!(store.line(key).unwrap().text, "e");
        assert_eq!(store.position(key), Some(4));
        assert!(store
            .line(LineRef {
                file_id: 1,
                line_no: 4
            })
            .is_none());
    }
}
