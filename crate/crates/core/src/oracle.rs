//! Reference linter: detection and autofix for eight single-line rules.
//!
//! Every rule is a token-level approximation of the ESLint rule with the
//! same name, using default options only. The fixtures under
//! `tests/fixtures/oracle` are the ground truth for rule behavior; where
//! these approximations disagree with ESLint on unusual input, the oracle
//! wins.
//!
//! | rule | flags | fix |
//! |------|-------|-----|
//! | `eqeqeq` | operator `==` / `!=` | `===` / `!==` |
//! | `no-var` | keyword `var` | `let` |
//! | `semi` | line ending in identifier, number, string, `)` or `]`, unless it starts with `if for while function else do try switch` | insert `;` |
//! | `quotes` | single-quoted string without an unescaped `"` | double quotes, `\'` unescaped |
//! | `no-floating-decimal` | number starting or ending with `.` | prefix / suffix `0` |
//! | `no-multi-spaces` | run of 2+ spaces not at column 0 | one space |
//! | `no-extra-semi` | `;` right after another `;`, outside parentheses | delete |
//! | `dot-notation` | `["key"]` after an identifier, `]` or `)` | `.key` |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexer::{is_keyword, tokenize, QuoteStyle, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    Eqeqeq,
    NoVar,
    Semi,
    Quotes,
    NoFloatingDecimal,
    NoMultiSpaces,
    NoExtraSemi,
    DotNotation,
}

impl RuleId {
    pub const ALL: [RuleId; 8] = [
        RuleId::Eqeqeq,
        RuleId::NoVar,
        RuleId::Semi,
        RuleId::Quotes,
        RuleId::NoFloatingDecimal,
        RuleId::NoMultiSpaces,
        RuleId::NoExtraSemi,
        RuleId::DotNotation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::Eqeqeq => "eqeqeq",
            RuleId::NoVar => "no-var",
            RuleId::Semi => "semi",
            RuleId::Quotes => "quotes",
            RuleId::NoFloatingDecimal => "no-floating-decimal",
            RuleId::NoMultiSpaces => "no-multi-spaces",
            RuleId::NoExtraSemi => "no-extra-semi",
            RuleId::DotNotation => "dot-notation",
        }
    }

    /// Parse a comma-separated list, e.g. `eqeqeq,semi`. `all` expands to every rule.
    pub fn parse_list(list: &str) -> Result<Vec<RuleId>> {
        if list.trim() == "all" {
            return Ok(RuleId::ALL.to_vec());
        }
        let mut rules = Vec::new();
        for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let rule: RuleId = part.parse()?;
            if !rules.contains(&rule) {
                rules.push(rule);
            }
        }
        Ok(rules)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::UnknownRule(s.to_string()))
    }
}

impl Serialize for RuleId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for RuleId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        name.parse().map_err(serde::de::Error::custom)
    }
}

/// Half-open column range, in chars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }

    fn of(token: &Token) -> Self {
        Self::new(token.start_col, token.end_col)
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
            || self.start == other.start && (self.is_empty() || other.is_empty())
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReplacementEdit {
    pub span: Span,
    pub new_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Finding {
    pub rule: RuleId,
    pub span: Span,
    pub message: String,
    pub fix: ReplacementEdit,
}

impl Finding {
    fn new(rule: RuleId, token: &Token, message: String, new_text: impl Into<String>) -> Self {
        Finding {
            rule,
            span: Span::of(token),
            message,
            fix: ReplacementEdit {
                span: Span::of(token),
                new_text: new_text.into(),
            },
        }
    }
}

/// Run one rule over one line. Findings are ordered by start column.
pub fn check(rule: RuleId, line: &str) -> Vec<Finding> {
    check_tokens(rule, &tokenize(line))
}

/// Like [`check`], for a rule given by name.
pub fn check_named(rule: &str, line: &str) -> Result<Vec<Finding>> {
    Ok(check(rule.parse()?, line))
}

pub fn check_all(rules: &[RuleId], line: &str) -> BTreeMap<RuleId, Vec<Finding>> {
    if rules.is_empty() {
        return BTreeMap::new();
    }
    let tokens = tokenize(line);
    rules
        .iter()
        .map(|&rule| (rule, check_tokens(rule, &tokens)))
        .collect()
}

/// Rule dispatch over an already tokenized line.
pub fn check_tokens(rule: RuleId, tokens: &[Token]) -> Vec<Finding> {
    let mut findings = match rule {
        RuleId::Eqeqeq => eqeqeq(tokens),
        RuleId::NoVar => no_var(tokens),
        RuleId::Semi => semi(tokens),
        RuleId::Quotes => quotes(tokens),
        RuleId::NoFloatingDecimal => no_floating_decimal(tokens),
        RuleId::NoMultiSpaces => no_multi_spaces(tokens),
        RuleId::NoExtraSemi => no_extra_semi(tokens),
        RuleId::DotNotation => dot_notation(tokens),
    };
    findings.sort_by_key(|f| (f.span.start, f.span.end));
    findings
}

/// Apply every non-overlapping fix for `rule`, right to left.
pub fn apply_fixes(rule: RuleId, line: &str) -> String {
    let findings = check(rule, line);
    apply_edits(line, findings.iter().map(|f| &f.fix))
}

/// Apply edits right to left, skipping any edit that overlaps one already applied.
pub fn apply_edits<'a>(line: &str, edits: impl IntoIterator<Item = &'a ReplacementEdit>) -> String {
    let mut edits: Vec<&ReplacementEdit> = edits.into_iter().collect();
    if edits.is_empty() {
        return line.to_string();
    }
    edits.sort_by(|a, b| {
        b.span
            .start
            .cmp(&a.span.start)
            .then(b.span.end.cmp(&a.span.end))
    });
    let mut chars: Vec<char> = line.chars().collect();
    let mut applied: Vec<Span> = Vec::new();
    for edit in edits {
        if edit.span.end > chars.len() || applied.iter().any(|s| s.overlaps(&edit.span)) {
            continue;
        }
        chars.splice(edit.span.start..edit.span.end, edit.new_text.chars());
        applied.push(edit.span);
    }
    chars.into_iter().collect()
}

fn significant(tokens: &[Token]) -> impl DoubleEndedIterator<Item = (usize, &Token)> {
    tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.kind.is_trivia())
}

fn eqeqeq(tokens: &[Token]) -> Vec<Finding> {
    tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Operator)
        .filter_map(|t| {
            let strict = match t.text.as_str() {
                "==" => "===",
                "!=" => "!==",
                _ => return None,
            };
            Some(Finding::new(
                RuleId::Eqeqeq,
                t,
                format!("Expected '{strict}' and instead saw '{}'.", t.text),
                strict,
            ))
        })
        .collect()
}

fn no_var(tokens: &[Token]) -> Vec<Finding> {
    let sig: Vec<&Token> = significant(tokens).map(|(_, t)| t).collect();
    sig.iter()
        .enumerate()
        // `obj.var` is a property name
        .filter(|&(i, t)| t.is(TokenKind::Keyword, "var") && !(i > 0 && sig[i - 1].is_punct(".")))
        .map(|(_, t)| {
            Finding::new(
                RuleId::NoVar,
                t,
                "Unexpected var, use let or const instead.".into(),
                "let",
            )
        })
        .collect()
}

const SEMI_EXEMPT_OPENERS: &[&str] = &[
    "if", "for", "while", "function", "else", "do", "try", "switch",
];

fn semi(tokens: &[Token]) -> Vec<Finding> {
    let mut sig = significant(tokens).map(|(_, t)| t);
    let Some(first) = sig.next() else {
        return Vec::new();
    };
    let last = sig.next_back().unwrap_or(first);
    if first.kind == TokenKind::Keyword && SEMI_EXEMPT_OPENERS.contains(&first.text.as_str()) {
        return Vec::new();
    }
    let ends_statement = matches!(
        last.kind,
        TokenKind::Identifier | TokenKind::Number | TokenKind::String(_)
    ) || last.is_punct(")")
        || last.is_punct("]");
    if !ends_statement {
        return Vec::new();
    }
    vec![Finding {
        rule: RuleId::Semi,
        span: Span::of(last),
        message: "Missing semicolon.".into(),
        fix: ReplacementEdit {
            span: Span::new(last.end_col, last.end_col),
            new_text: ";".into(),
        },
    }]
}

/// Content between the delimiters of a terminated string token.
fn string_content(token: &Token) -> &str {
    let text = token.text.as_str();
    let open = text.chars().next().map_or(0, char::len_utf8);
    &text[open..text.len() - 1]
}

fn has_unescaped(content: &str, needle: char) -> bool {
    let mut chars = content.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            chars.next();
        } else if c == needle {
            return true;
        }
    }
    false
}

fn quotes(tokens: &[Token]) -> Vec<Finding> {
    tokens
        .iter()
        .filter(|t| t.kind == TokenKind::String(QuoteStyle::Single))
        .filter(|t| !has_unescaped(string_content(t), '"'))
        .map(|t| {
            let content = string_content(t);
            let mut rewritten = String::with_capacity(t.text.len());
            rewritten.push('"');
            let mut chars = content.chars();
            while let Some(c) = chars.next() {
                if c == '\\' {
                    match chars.next() {
                        Some('\'') => rewritten.push('\''),
                        Some(other) => {
                            rewritten.push('\\');
                            rewritten.push(other);
                        }
                        None => rewritten.push('\\'),
                    }
                } else {
                    rewritten.push(c);
                }
            }
            rewritten.push('"');
            Finding::new(
                RuleId::Quotes,
                t,
                "Strings must use doublequote.".into(),
                rewritten,
            )
        })
        .collect()
}

fn no_floating_decimal(tokens: &[Token]) -> Vec<Finding> {
    tokens
        .iter()
        .filter(|t| t.kind == TokenKind::Number)
        .filter_map(|t| {
            if t.text.starts_with('.') {
                Some(Finding::new(
                    RuleId::NoFloatingDecimal,
                    t,
                    "A leading decimal point can be confused with a dot.".into(),
                    format!("0{}", t.text),
                ))
            } else if t.text.ends_with('.') {
                Some(Finding::new(
                    RuleId::NoFloatingDecimal,
                    t,
                    "A trailing decimal point can be confused with a dot.".into(),
                    format!("{}0", t.text),
                ))
            } else {
                None
            }
        })
        .collect()
}

fn no_multi_spaces(tokens: &[Token]) -> Vec<Finding> {
    tokens
        .iter()
        .filter(|t| {
            t.kind == TokenKind::Whitespace
                && t.start_col > 0
                && t.len() >= 2
                && t.text.chars().all(|c| c == ' ')
        })
        .map(|t| {
            Finding::new(
                RuleId::NoMultiSpaces,
                t,
                format!("Multiple spaces found ({}).", t.len()),
                " ",
            )
        })
        .collect()
}

fn no_extra_semi(tokens: &[Token]) -> Vec<Finding> {
    let mut findings = Vec::new();
    let mut depth: i64 = 0;
    let mut prev: Option<&Token> = None;
    for (_, t) in significant(tokens) {
        if t.is_punct("(") {
            depth += 1;
        } else if t.is_punct(")") {
            depth -= 1;
        } else if t.is_punct(";") && depth <= 0 && prev.is_some_and(|p| p.is_punct(";")) {
            findings.push(Finding::new(
                RuleId::NoExtraSemi,
                t,
                "Unnecessary semicolon.".into(),
                "",
            ));
        }
        prev = Some(t);
    }
    findings
}

fn is_plain_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_' || c == '$')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$')
}

fn dot_notation(tokens: &[Token]) -> Vec<Finding> {
    let sig: Vec<&Token> = significant(tokens).map(|(_, t)| t).collect();
    let mut findings = Vec::new();
    for w in 1..sig.len().saturating_sub(2) {
        let (prev, open, key, close) = (sig[w - 1], sig[w], sig[w + 1], sig[w + 2]);
        if !open.is_punct("[") || !close.is_punct("]") {
            continue;
        }
        if !matches!(
            key.kind,
            TokenKind::String(QuoteStyle::Single | QuoteStyle::Double)
        ) {
            continue;
        }
        let receiver_ok =
            prev.kind == TokenKind::Identifier || prev.is_punct("]") || prev.is_punct(")");
        let name = string_content(key);
        if !receiver_ok || !is_plain_identifier(name) || is_keyword(name) {
            continue;
        }
        let span = Span::new(open.start_col, close.end_col);
        findings.push(Finding {
            rule: RuleId::DotNotation,
            span,
            message: format!("[{}] is better written in dot notation.", key.text),
            fix: ReplacementEdit {
                span,
                new_text: format!(".{name}"),
            },
        });
    }
    findings
}
