//! Oracle fixture files.
//!
//! A fixture is a plain text file with one case per line, next to a JSON
//! sidecar that maps the rule name to the expected findings:
//!
//! ```json
//! { "eqeqeq": [ { "line": 1, "spans": [[2, 4]] } ] }
//! ```
//!
//! Line numbers are 1-based. Lines not listed are expected to be compliant.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{check, RuleId, Span};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpectedCase {
    pub line: usize,
    pub spans: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub rule: RuleId,
    pub lines: Vec<String>,
    /// Expected finding spans per 1-based line; absent means compliant.
    pub expected: BTreeMap<usize, Vec<Span>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub line: usize,
    pub text: String,
    pub expected: Vec<Span>,
    pub actual: Vec<Span>,
}

impl Fixture {
    /// Load `<dir>/<rule>.txt` and `<dir>/<rule>.expected.json`.
    pub fn load(dir: &Path, rule: RuleId) -> Result<Self> {
        let text_path = dir.join(format!("{rule}.txt"));
        let json_path = dir.join(format!("{rule}.expected.json"));
        let text = fs::read_to_string(&text_path).map_err(|e| Error::io(&text_path, e))?;
        let json = fs::read_to_string(&json_path).map_err(|e| Error::io(&json_path, e))?;
        let sidecar: BTreeMap<String, Vec<ExpectedCase>> =
            serde_json::from_str(&json).map_err(|e| format_error(&json_path, e))?;
        let cases = sidecar.get(rule.name()).ok_or_else(|| Error::Format {
            path: json_path.clone(),
            line: 1,
            message: format!("no entry for rule `{rule}`"),
        })?;
        let lines: Vec<String> = text.lines().map(str::to_string).collect();
        let mut expected = BTreeMap::new();
        for case in cases {
            if case.line == 0 || case.line > lines.len() {
                return Err(Error::Format {
                    path: json_path.clone(),
                    line: case.line,
                    message: format!("line {} out of range", case.line),
                });
            }
            let spans = case.spans.iter().map(|&(s, e)| Span::new(s, e)).collect();
            expected.insert(case.line, spans);
        }
        Ok(Fixture {
            rule,
            lines,
            expected,
        })
    }

    pub fn positives(&self) -> usize {
        self.expected.len()
    }

    pub fn negatives(&self) -> usize {
        self.lines.len() - self.expected.len()
    }

    /// Cases where the oracle disagrees with the fixture labels.
    pub fn verify(&self) -> Vec<Mismatch> {
        self.lines
            .iter()
            .enumerate()
            .filter_map(|(i, text)| {
                let line = i + 1;
                let expected = self.expected.get(&line).cloned().unwrap_or_default();
                let actual: Vec<Span> = check(self.rule, text).iter().map(|f| f.span).collect();
                (expected != actual).then(|| Mismatch {
                    line,
                    text: text.clone(),
                    expected,
                    actual,
                })
            })
            .collect()
    }
}

fn format_error(path: &Path, e: serde_json::Error) -> Error {
    Error::Format {
        path: PathBuf::from(path),
        line: e.line(),
        message: e.to_string(),
    }
}
