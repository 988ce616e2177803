//! Applying trained classifiers to source files.

use std::fmt;

use serde::Serialize;

use crate::classifier::LineClassifier;
use crate::oracle::RuleId;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LintWarning {
    pub path: String,
    /// 1-based.
    pub line: u32,
    pub practice: RuleId,
    pub score: f64,
}

impl fmt::Display for LintWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: [{}] warning ({:.3})",
            self.path, self.line, self.practice, self.score
        )
    }
}

/// Warnings for every line of `text` no longer than `max_len` characters
/// that some model predicts non-compliant, sorted by line then practice.
pub fn lint_text(
    path: &str,
    text: &str,
    models: &[&dyn LineClassifier],
    max_len: Option<usize>,
) -> Vec<LintWarning> {
    let mut warnings = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if max_len.is_some_and(|m| line.chars().count() > m) {
            continue;
        }
        for model in models {
            let p = model.predict(line);
            if p.label.is_positive() {
                warnings.push(LintWarning {
                    path: path.to_string(),
                    line: i as u32 + 1,
                    practice: model.rule(),
                    score: p.score,
                });
            }
        }
    }
    sort_warnings(&mut warnings);
    warnings
}

/// Order by (path, line, practice).
pub fn sort_warnings(warnings: &mut [LintWarning]) {
    warnings.sort_by(|a, b| {
        (a.path.as_str(), a.line, a.practice).cmp(&(b.path.as_str(), b.line, b.practice))
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::Prediction;
    use crate::dataset::Label;

    struct Contains(RuleId, &'static str);

    impl LineClassifier for Contains {
        fn rule(&self) -> RuleId {
            self.0
        }

        fn predict(&self, line: &str) -> Prediction {
            let hit = line.contains(self.1);
            Prediction {
                label: if hit {
                    Label::NonCompliant
                } else {
                    Label::Compliant
                },
                score: if hit { 0.9 } else { 0.1 },
            }
        }
    }

    #[test]
    fn formats_and_orders_warnings() {
        let semi = Contains(RuleId::Semi, "b");
        let eq = Contains(RuleId::Eqeqeq, "==");
        let models: [&dyn LineClassifier; 2] = [&semi, &eq];
        let out = lint_text("a.js", "x = 1;\na == b\n", &models, None);
        let lines: Vec<String> = out.iter().map(ToString::to_string).collect();
        assert_eq!(
            lines,
            [
                "a.js:2: [eqeqeq] warning (0.900)",
                "a.js:2: [semi] warning (0.900)"
            ]
        );
    }

    #[test]
    fn skips_long_lines_and_empty_text() {
        let eq = Contains(RuleId::Eqeqeq, "==");
        let models: [&dyn LineClassifier; 1] = [&eq];
        assert!(lint_text("a.js", "", &models, None).is_empty());
        assert!(lint_text("a.js", "aaaa == b", &models, Some(4)).is_empty());
        assert_eq!(lint_text("a.js", "a == b", &models, Some(6)).len(), 1);
    }
}
