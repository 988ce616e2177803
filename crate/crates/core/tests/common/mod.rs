#![allow(dead_code)]

use rand::Rng;

const FRAGMENTS: &[&str] = &[
    "var",
    "let",
    "const",
    "if",
    "for",
    "return",
    "function",
    "x",
    "obj",
    "a1",
    "_b",
    "$c",
    "==",
    "!=",
    "===",
    "!==",
    "=",
    "+",
    "-",
    "*",
    "/",
    "&&",
    "||",
    "=>",
    "...",
    "?",
    ":",
    ";",
    ";;",
    ",",
    ".",
    "(",
    ")",
    "[",
    "]",
    "{",
    "}",
    "0",
    "1",
    ".5",
    "2.",
    "0.5",
    "1e3",
    "0x1F",
    "'a'",
    "\"b\"",
    "'it\\'s'",
    "'say \"hi\"'",
    "`t`",
    "[\"key\"]",
    "[\"a-b\"]",
    "// note",
    "/* c */",
    "/* open",
    "'open",
    " ",
    "  ",
    "   ",
    "\t",
    "#",
    "@",
    "é",
    "λ",
];

/// Printable text without newlines, including some non-ASCII characters.
pub fn printable_line<R: Rng>(rng: &mut R) -> String {
    let len = rng.gen_range(0..80);
    (0..len)
        .map(|_| {
            if rng.gen_bool(0.95) {
                rng.gen_range(0x20u8..0x7f) as char
            } else {
                ['é', 'λ', '中', '→', '\u{a0}'][rng.gen_range(0..5)]
            }
        })
        .collect()
}

/// Concatenation of JavaScript-flavored fragments, biased toward the
/// constructs the rules look at.
pub fn fuzz_line<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(0..14);
    let mut s = String::new();
    for _ in 0..n {
        s.push_str(FRAGMENTS[rng.gen_range(0..FRAGMENTS.len())]);
        if rng.gen_bool(0.5) {
            s.push(' ');
        }
    }
    s
}
