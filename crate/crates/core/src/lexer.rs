//! Error-tolerant single-line tokenizer for JavaScript-like source.
//!
//! The lexer is total: every input produces a token stream whose texts
//! concatenate back to the input, and bytes it cannot classify become
//! [`TokenKind::Unknown`] tokens. Columns count Unicode scalar values, not
//! bytes.
//!
//! Reserved words lexed as [`TokenKind::Keyword`]:
//!
//! `break case catch class const continue debugger default delete do else
//! export extends finally for function if import in instanceof let new
//! return super switch throw try typeof var void while with yield`
//!
//! The literal-like names `true`, `false`, `null`, `undefined` and `this`
//! lex as identifiers.
//!
//! Known limitations:
//! - regex literals are not recognized; `/a/g` lexes as operators and
//!   identifiers;
//! - template literals are a single token, `${...}` is not sub-lexed;
//! - an unterminated string or block comment becomes one `Unknown` token
//!   running to the end of the line.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Fixed reserved-word list.
pub const KEYWORDS: &[&str] = &[
    "break",
    "case",
    "catch",
    "class",
    "const",
    "continue",
    "debugger",
    "default",
    "delete",
    "do",
    "else",
    "export",
    "extends",
    "finally",
    "for",
    "function",
    "if",
    "import",
    "in",
    "instanceof",
    "let",
    "new",
    "return",
    "super",
    "switch",
    "throw",
    "try",
    "typeof",
    "var",
    "void",
    "while",
    "with",
    "yield",
];

/// Operator table, longest entries first so the first match is the longest.
const OPERATORS: &[&str] = &[
    ">>>=", "===", "!==", "**=", "<<=", ">>=", ">>>", "...", "&&=", "||=", "??=", "==", "!=", "<=",
    ">=", "&&", "||", "??", "?.", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "**",
    "<<", ">>", "=>", "=", "<", ">", "+", "-", "*", "/", "%", "&", "|", "^", "!", "~", "?", ":",
];

const PUNCTUATION: &[char] = &['(', ')', '[', ']', '{', '}', ';', ',', '.'];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuoteStyle {
    Single,
    Double,
    Template,
}

impl QuoteStyle {
    pub fn delimiter(self) -> char {
        match self {
            QuoteStyle::Single => '\'',
            QuoteStyle::Double => '"',
            QuoteStyle::Template => '`',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TokenKind {
    Identifier,
    Keyword,
    Number,
    String(QuoteStyle),
    Operator,
    Punctuation,
    Comment,
    Whitespace,
    Unknown,
}

impl TokenKind {
    /// Whitespace and comments carry no syntax.
    pub fn is_trivia(self) -> bool {
        matches!(self, TokenKind::Whitespace | TokenKind::Comment)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TokenKind::Identifier => "Identifier",
            TokenKind::Keyword => "Keyword",
            TokenKind::Number => "Number",
            TokenKind::String(QuoteStyle::Single) => "String(single)",
            TokenKind::String(QuoteStyle::Double) => "String(double)",
            TokenKind::String(QuoteStyle::Template) => "String(template)",
            TokenKind::Operator => "Operator",
            TokenKind::Punctuation => "Punctuation",
            TokenKind::Comment => "Comment",
            TokenKind::Whitespace => "Whitespace",
            TokenKind::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// Inclusive, in chars.
    pub start_col: usize,
    /// Exclusive, in chars.
    pub end_col: usize,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_punct(&self, text: &str) -> bool {
        self.is(TokenKind::Punctuation, text)
    }

    pub fn len(&self) -> usize {
        self.end_col - self.start_col
    }

    pub fn is_empty(&self) -> bool {
        self.start_col == self.end_col
    }
}

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

pub(crate) fn is_ident_part(c: char) -> bool {
    is_ident_start(c) || c.is_alphanumeric()
}

/// Tokenize one physical line.
///
/// Never fails. A newline in the input is treated as whitespace.
pub fn tokenize(line: &str) -> Vec<Token> {
    Lexer::new(line).run()
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    tokens: Vec<Token>,
}

impl Lexer {
    fn new(line: &str) -> Self {
        Self {
            chars: line.chars().collect(),
            pos: 0,
            tokens: Vec::new(),
        }
    }

    fn peek(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn emit(&mut self, kind: TokenKind, end: usize) {
        debug_assert!(end > self.pos);
        let text: String = self.chars[self.pos..end].iter().collect();
        self.tokens.push(Token {
            kind,
            text,
            start_col: self.pos,
            end_col: end,
        });
        self.pos = end;
    }

    fn run(mut self) -> Vec<Token> {
        while let Some(c) = self.peek(0) {
            if c.is_whitespace() {
                self.whitespace();
            } else if c == '/' && self.peek(1) == Some('/') {
                let end = self.chars.len();
                self.emit(TokenKind::Comment, end);
            } else if c == '/' && self.peek(1) == Some('*') {
                self.block_comment();
            } else if c == '\'' || c == '"' || c == '`' {
                self.string(c);
            } else if c.is_ascii_digit() || (c == '.' && self.starts_leading_dot_number()) {
                self.number();
            } else if is_ident_start(c) {
                self.identifier();
            } else if PUNCTUATION.contains(&c) && !self.at_spread() {
                let end = self.pos + 1;
                self.emit(TokenKind::Punctuation, end);
            } else if let Some(len) = self.operator_len() {
                let end = self.pos + len;
                self.emit(TokenKind::Operator, end);
            } else {
                let end = self.pos + 1;
                self.emit(TokenKind::Unknown, end);
            }
        }
        self.tokens
    }

    fn whitespace(&mut self) {
        let mut end = self.pos;
        while end < self.chars.len() && self.chars[end].is_whitespace() {
            end += 1;
        }
        self.emit(TokenKind::Whitespace, end);
    }

    fn block_comment(&mut self) {
        let mut end = self.pos + 2;
        while end + 1 < self.chars.len() {
            if self.chars[end] == '*' && self.chars[end + 1] == '/' {
                self.emit(TokenKind::Comment, end + 2);
                return;
            }
            end += 1;
        }
        let end = self.chars.len();
        self.emit(TokenKind::Unknown, end);
    }

    fn string(&mut self, quote: char) {
        let style = match quote {
            '\'' => QuoteStyle::Single,
            '"' => QuoteStyle::Double,
            _ => QuoteStyle::Template,
        };
        let mut end = self.pos + 1;
        while end < self.chars.len() {
            match self.chars[end] {
                '\\' => end += 2,
                c if c == quote => {
                    self.emit(TokenKind::String(style), end + 1);
                    return;
                }
                _ => end += 1,
            }
        }
        let end = self.chars.len();
        self.emit(TokenKind::Unknown, end);
    }

    /// `.5` is a number only when the dot cannot be a member access.
    fn starts_leading_dot_number(&self) -> bool {
        let next_is_digit = self.peek(1).is_some_and(|c| c.is_ascii_digit());
        let prev_is_word = self.pos > 0 && is_ident_part(self.chars[self.pos - 1]);
        next_is_digit && !prev_is_word
    }

    fn at_spread(&self) -> bool {
        self.peek(0) == Some('.') && self.peek(1) == Some('.') && self.peek(2) == Some('.')
    }

    fn number(&mut self) {
        let chars = &self.chars;
        let digits = |mut i: usize| {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            i
        };
        let mut end = self.pos;
        if chars[end] == '0'
            && matches!(chars.get(end + 1), Some('x' | 'X'))
            && chars.get(end + 2).is_some_and(|c| c.is_ascii_hexdigit())
        {
            end += 2;
            while end < chars.len() && chars[end].is_ascii_hexdigit() {
                end += 1;
            }
        } else {
            if chars[end] == '.' {
                end = digits(end + 1);
            } else {
                end = digits(end);
                if chars.get(end) == Some(&'.') {
                    let after = chars.get(end + 1).copied();
                    if after.is_some_and(|c| c.is_ascii_digit()) {
                        end = digits(end + 1);
                    } else if !after.is_some_and(is_ident_start) {
                        // trailing dot: `5.`
                        end += 1;
                    }
                }
            }
            if matches!(chars.get(end), Some('e' | 'E')) {
                let mut exp = end + 1;
                if matches!(chars.get(exp), Some('+' | '-')) {
                    exp += 1;
                }
                if chars.get(exp).is_some_and(|c| c.is_ascii_digit()) {
                    end = digits(exp);
                }
            }
        }
        if chars.get(end) == Some(&'n') && !chars[self.pos..end].contains(&'.') {
            end += 1;
        }
        self.emit(TokenKind::Number, end);
    }

    fn identifier(&mut self) {
        let mut end = self.pos + 1;
        while end < self.chars.len() && is_ident_part(self.chars[end]) {
            end += 1;
        }
        let word: String = self.chars[self.pos..end].iter().collect();
        let kind = if is_keyword(&word) {
            TokenKind::Keyword
        } else {
            TokenKind::Identifier
        };
        self.emit(kind, end);
    }

    fn operator_len(&self) -> Option<usize> {
        let rest = &self.chars[self.pos..];
        OPERATORS
            .iter()
            .find(|op| {
                op.chars().count() <= rest.len() && op.chars().zip(rest).all(|(a, &b)| a == b)
            })
            .map(|op| op.chars().count())
    }
}
