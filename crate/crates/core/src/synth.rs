//! Seeded generator of synthetic JavaScript projects with planted rule
//! violations.
//!
//! Ordinary lines come from a weighted set of templates covering common
//! statement shapes, including compliant constructs that share surface
//! features with violations (object-literal entries without a trailing
//! `;`, `for (;;)`, bracket access with non-identifier keys, single-quoted
//! strings holding `"`). A planted line violates exactly one rule.
//! Every generated line is checked against the oracle before it is kept.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{CorpusStore, FileId};
use crate::error::{Error, Result};
use crate::oracle::{check_all, RuleId};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub projects: usize,
    pub files: usize,
    pub lines_per_file: usize,
    /// Probability that a line carries a planted violation of a given rule.
    pub violation_rate: f64,
    pub rules: Vec<RuleId>,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            projects: 10,
            files: 600,
            lines_per_file: 200,
            violation_rate: 0.009,
            rules: RuleId::ALL.to_vec(),
            seed: 0,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        if self.projects == 0 || self.files == 0 || self.lines_per_file == 0 {
            return Err(Error::invalid(
                "projects, files and lines per file must be positive",
            ));
        }
        let total = self.violation_rate * self.rules.len() as f64;
        if !(0.0..=1.0).contains(&self.violation_rate) || total > 1.0 {
            return Err(Error::invalid(format!(
                "violation rate {} is out of range for {} rules",
                self.violation_rate,
                self.rules.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthFile {
    pub project: String,
    /// Relative to the project root.
    pub path: String,
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Planted {
    /// Index into [`SynthCorpus::files`].
    pub file: usize,
    /// 1-based.
    pub line_no: u32,
    pub rule: RuleId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthCorpus {
    pub files: Vec<SynthFile>,
    pub planted: Vec<Planted>,
}

impl SynthCorpus {
    pub fn line_count(&self) -> usize {
        self.files.iter().map(|f| f.lines.len()).sum()
    }

    pub fn planted_count(&self, rule: RuleId) -> usize {
        self.planted.iter().filter(|p| p.rule == rule).count()
    }

    /// Load into a store; file ids follow the order of `files`.
    pub fn to_store(&self) -> CorpusStore {
        let mut store = CorpusStore::new();
        for f in &self.files {
            let mut text = f.lines.join("\n");
            text.push('\n');
            let id: FileId = store.add_file(&f.project, &f.path, None, &text);
            debug_assert_eq!(id as usize + 1, store.files().len());
        }
        store
    }

    /// Write each project as a directory under `root`.
    pub fn write_to(&self, root: &Path) -> Result<()> {
        for f in &self.files {
            let path = root.join(&f.project).join(&f.path);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            let mut text = f.lines.join("\n");
            text.push('\n');
            fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

const NAMES: &[&str] = &[
    "data", "items", "count", "user", "config", "result", "value", "node", "list", "index",
    "options", "state", "event", "target", "response", "request", "payload", "cache", "total",
    "entry", "key", "buffer", "handler", "callback", "element", "model", "view", "store", "path",
    "name", "size", "offset", "limit", "query", "params", "token", "session", "record", "row",
    "column", "width", "height", "timer", "queue", "map", "set", "parent", "child", "source",
];

const WORDS: &[&str] = &[
    "id", "name", "type", "value", "status", "title", "label", "mode", "kind", "url", "method",
    "body", "headers", "error", "message", "active", "ready", "done", "open", "color",
];

const METHODS: &[&str] = &[
    "push", "get", "set", "has", "map", "filter", "reduce", "join", "split", "slice", "then",
    "catch", "emit", "send", "render", "update", "remove", "append", "resolve", "forEach",
];

const NUMBERS: &[&str] = &[
    "0", "1", "2", "3", "10", "42", "100", "255", "1000", "0.5", "1.5", "0.25", "3.14",
];

const FLOATING: &[&str] = &[".5", ".25", ".75", ".1", "2.", "1.", "10.", ".125", "3."];

struct Gen<'r> {
    rng: &'r mut ChaCha8Rng,
}

impl Gen<'_> {
    fn pick<'a>(&mut self, xs: &[&'a str]) -> &'a str {
        xs.choose(self.rng).copied().unwrap_or("x")
    }

    fn name(&mut self) -> String {
        let a = self.pick(NAMES);
        if self.rng.gen_bool(0.3) {
            let b = self.pick(WORDS);
            let mut cap = b.to_string();
            cap[..1].make_ascii_uppercase();
            format!("{a}{cap}")
        } else {
            a.to_string()
        }
    }

    fn number(&mut self) -> &'static str {
        self.pick(NUMBERS)
    }

    fn string(&mut self) -> String {
        format!("\"{}\"", self.pick(WORDS))
    }

    fn atom(&mut self) -> String {
        match self.rng.gen_range(0..6) {
            0 | 1 => self.name(),
            2 => self.number().to_string(),
            3 => self.string(),
            4 => format!("{}.{}", self.name(), self.pick(WORDS)),
            _ => ["true", "false", "null"][self.rng.gen_range(0..3)].to_string(),
        }
    }

    fn expr(&mut self) -> String {
        match self.rng.gen_range(0..8) {
            0..=2 => self.atom(),
            3 => format!("{} + {}", self.name(), self.number()),
            4 => format!("{}.{}({})", self.name(), self.pick(METHODS), self.args()),
            5 => format!("{}({})", self.name(), self.args()),
            6 => format!("[{}, {}]", self.number(), self.number()),
            _ => format!("{}.length", self.name()),
        }
    }

    fn args(&mut self) -> String {
        let n = self.rng.gen_range(0..3);
        (0..n).map(|_| self.atom()).collect::<Vec<_>>().join(", ")
    }

    fn indent(&mut self) -> String {
        " ".repeat(2 * self.rng.gen_range(0..4))
    }

    fn decl(&mut self) -> &'static str {
        if self.rng.gen_bool(0.6) {
            "const"
        } else {
            "let"
        }
    }

    /// A line no rule should flag.
    fn compliant(&mut self) -> String {
        let ind = self.indent();
        let body = match self.rng.gen_range(0..100) {
            0..=11 => format!("{} {} = {};", self.decl(), self.name(), self.expr()),
            12..=17 => format!("{}.{}({});", self.name(), self.pick(METHODS), self.args()),
            18..=21 => format!("{}({});", self.name(), self.args()),
            22..=27 => "}".to_string(),
            28..=29 => "} else {".to_string(),
            30..=34 => format!("return {};", self.expr()),
            35..=38 => format!("if ({} === {}) {{", self.name(), self.atom()),
            39..=40 => format!("if ({} !== null) {{", self.name()),
            41..=43 => format!("function {}({}) {{", self.name(), self.params()),
            44..=45 => format!("for (let i = 0; i < {}.length; i++) {{", self.name()),
            46..=50 => format!("// {} the {}", self.pick(METHODS), self.pick(WORDS)),
            51..=56 => String::new(),
            57..=58 => format!("const {} = require(\"{}\");", self.name(), self.pick(WORDS)),
            59 => format!(
                "throw new Error(\"{} {}\");",
                self.pick(WORDS),
                self.pick(WORDS)
            ),
            60..=61 => format!(
                "const {} = ({}) => {} + 1;",
                self.name(),
                self.name(),
                self.name()
            ),
            62 => format!(
                "const {} = `${{{}}} {}`;",
                self.name(),
                self.name(),
                self.pick(WORDS)
            ),
            63..=64 => format!("case {}:", self.string()),
            65 => "break;".to_string(),
            66..=67 => format!(
                "const {} = {} ? {} : {};",
                self.name(),
                self.name(),
                self.atom(),
                self.atom()
            ),
            68..=70 => format!("{}.{} = {};", self.name(), self.pick(WORDS), self.expr()),
            71..=78 => format!("{}: {},", self.pick(WORDS), self.atom()),
            79..=80 => format!("const {} = {{", self.name()),
            81..=82 => "});".to_string(),
            83..=84 => format!(
                "{}.{}({}, {}",
                self.name(),
                self.pick(METHODS),
                self.atom(),
                self.atom()
            ),
            85..=86 => format!("{} = {}[{}];", self.name(), self.name(), self.name()),
            87 => format!("{} = {}[{}];", self.name(), self.name(), self.number()),
            88 => format!(
                "{} = {}[\"{}-{}\"];",
                self.name(),
                self.name(),
                self.pick(WORDS),
                self.pick(WORDS)
            ),
            89 => "for (;;) {".to_string(),
            90 => format!(
                "const {} = '<a class=\"{}\">';",
                self.name(),
                self.pick(WORDS)
            ),
            91..=92 => format!("while ({} > {}) {{", self.name(), self.number()),
            93..=94 => format!("{}++;", self.name()),
            95..=96 => format!("{} += {};", self.name(), self.number()),
            _ => format!("await {}.{}();", self.name(), self.pick(METHODS)),
        };
        ind + &body
    }

    fn params(&mut self) -> String {
        let n = self.rng.gen_range(0..3);
        (0..n).map(|_| self.name()).collect::<Vec<_>>().join(", ")
    }

    /// A line that violates `rule` and nothing else (before the oracle
    /// check confirms it).
    fn violating(&mut self, rule: RuleId) -> String {
        let ind = self.indent();
        let body = match rule {
            RuleId::Eqeqeq => {
                let op = if self.rng.gen_bool(0.7) { "==" } else { "!=" };
                match self.rng.gen_range(0..3) {
                    0 => format!("if ({} {op} {}) {{", self.name(), self.atom()),
                    1 => format!("return {} {op} {};", self.name(), self.atom()),
                    _ => format!(
                        "const {} = {} {op} {};",
                        self.name(),
                        self.name(),
                        self.atom()
                    ),
                }
            }
            RuleId::NoVar => match self.rng.gen_range(0..3) {
                0 => format!("var {} = {};", self.name(), self.expr()),
                1 => format!("for (var i = 0; i < {}.length; i++) {{", self.name()),
                _ => format!("var {};", self.name()),
            },
            RuleId::Semi => match self.rng.gen_range(0..4) {
                0 => format!("{} {} = {}", self.decl(), self.name(), self.expr()),
                1 => format!("{}.{}({})", self.name(), self.pick(METHODS), self.args()),
                2 => format!("return {}", self.expr()),
                _ => format!("{} = {}", self.name(), self.atom()),
            },
            RuleId::Quotes => match self.rng.gen_range(0..3) {
                0 => format!("{} {} = '{}';", self.decl(), self.name(), self.pick(WORDS)),
                1 => format!(
                    "{}.{}('{}');",
                    self.name(),
                    self.pick(METHODS),
                    self.pick(WORDS)
                ),
                _ => format!("const {} = require('{}');", self.name(), self.pick(WORDS)),
            },
            RuleId::NoFloatingDecimal => {
                let n = self.pick(FLOATING);
                match self.rng.gen_range(0..3) {
                    0 => format!("{} {} = {n};", self.decl(), self.name()),
                    1 => format!("{}.{} = {n};", self.name(), self.pick(WORDS)),
                    _ => format!("return {} * {n};", self.name()),
                }
            }
            RuleId::NoMultiSpaces => {
                let gap = " ".repeat(self.rng.gen_range(2..5));
                match self.rng.gen_range(0..3) {
                    0 => format!("{} {} ={gap}{};", self.decl(), self.name(), self.expr()),
                    1 => format!("return{gap}{};", self.expr()),
                    _ => format!("if ({}{gap}=== {}) {{", self.name(), self.atom()),
                }
            }
            RuleId::NoExtraSemi => match self.rng.gen_range(0..3) {
                0 => format!("{} {} = {};;", self.decl(), self.name(), self.expr()),
                1 => format!("{}.{}({});;", self.name(), self.pick(METHODS), self.args()),
                _ => format!("return {};;", self.expr()),
            },
            RuleId::DotNotation => {
                let key = self.pick(WORDS);
                match self.rng.gen_range(0..3) {
                    0 => format!("{} = {}[\"{key}\"];", self.name(), self.name()),
                    1 => format!("{}[\"{key}\"] = {};", self.name(), self.atom()),
                    _ => format!("return {}[\"{key}\"];", self.name()),
                }
            }
        };
        ind + &body
    }
}

const MAX_ATTEMPTS: usize = 1000;

fn flagged_rules(line: &str) -> Vec<RuleId> {
    check_all(&RuleId::ALL, line)
        .into_iter()
        .filter(|(_, f)| !f.is_empty())
        .map(|(r, _)| r)
        .collect()
}

fn draw(g: &mut Gen<'_>, rule: Option<RuleId>) -> Result<String> {
    let want: Vec<RuleId> = rule.into_iter().collect();
    for _ in 0..MAX_ATTEMPTS {
        let line = match rule {
            Some(r) => g.violating(r),
            None => g.compliant(),
        };
        if flagged_rules(&line) == want {
            return Ok(line);
        }
    }
    Err(Error::invalid(format!(
        "could not generate a line for {:?} after {MAX_ATTEMPTS} attempts",
        rule.map(RuleId::name)
    )))
}

pub fn generate(config: &SynthConfig) -> Result<SynthCorpus> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut g = Gen { rng: &mut rng };
    let mut files = Vec::with_capacity(config.files);
    let mut planted = Vec::new();
    for file in 0..config.files {
        let project = format!("project{:02}", file % config.projects);
        let path = format!("src/module{:04}.js", file / config.projects);
        let mut lines = Vec::with_capacity(config.lines_per_file);
        for line_no in 1..=config.lines_per_file {
            let u: f64 = g.rng.gen();
            let slot = (u / config.violation_rate) as usize;
            let rule = config.rules.get(slot).copied();
            lines.push(draw(&mut g, rule)?);
            if let Some(rule) = rule {
                planted.push(Planted {
                    file,
                    line_no: line_no as u32,
                    rule,
                });
            }
        }
        files.push(SynthFile {
            project,
            path,
            lines,
        });
    }
    Ok(SynthCorpus { files, planted })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SynthConfig {
        SynthConfig {
            projects: 3,
            files: 12,
            lines_per_file: 50,
            violation_rate: 0.02,
            seed,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(generate(&small(7)).unwrap(), generate(&small(7)).unwrap());
        assert_ne!(generate(&small(7)).unwrap(), generate(&small(8)).unwrap());
    }

    #[test]
    fn planted_lines_match_the_oracle() {
        let corpus = generate(&small(3)).unwrap();
        assert_eq!(corpus.line_count(), 600);
        let mut expected = Vec::new();
        for (i, f) in corpus.files.iter().enumerate() {
            for (j, line) in f.lines.iter().enumerate() {
                for rule in flagged_rules(line) {
                    expected.push(Planted {
                        file: i,
                        line_no: j as u32 + 1,
                        rule,
                    });
                }
            }
        }
        assert_eq!(expected, corpus.planted);
    }

    #[test]
    fn rejects_rates_that_do_not_fit() {
        let config = SynthConfig {
            violation_rate: 0.2,
            ..small(0)
        };
        assert!(generate(&config).is_err());
    }

    #[test]
    fn store_and_disk_agree() {
        let corpus = generate(&small(1)).unwrap();
        let store = corpus.to_store();
        assert_eq!(store.files().len(), 12);
        assert_eq!(store.lines().len(), 600);
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path();
        corpus.write_to(dir).unwrap();
        let f = &corpus.files[5];
        let text = fs::read_to_string(dir.join(&f.project).join(&f.path)).unwrap();
        assert_eq!(text.lines().count(), f.lines.len());
    }
}
