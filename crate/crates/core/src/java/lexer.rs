//! Tolerant Java tokenizer.
//!
//! The lexer never fails: unterminated comments, strings and text blocks run
//! to the end of their line (or file) and unknown characters become single
//! punctuation tokens. Comments are dropped, but every token records the
//! lines it covers so that code-line accounting can be derived from the same
//! pass.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TokenKind {
    Ident,
    Number,
    Str,
    Char,
    Punct,
    At,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    /// 1-based line of the first character.
    pub line: u32,
    /// 1-based line of the last character (differs for text blocks).
    pub end_line: u32,
}

impl<'a> Token<'a> {
    pub fn is(&self, text: &str) -> bool {
        self.text == text && self.kind != TokenKind::Str && self.kind != TokenKind::Char
    }

    pub fn is_word(&self) -> bool {
        matches!(self.kind, TokenKind::Ident | TokenKind::Number)
    }
}

// `<`, `>`, `<<`, `>>`, `<=`, `>=` are deliberately absent: angle brackets are
// always single tokens so nested generics close one level at a time.
const MULTI_PUNCT: &[&str] =
    &["...", "->", "::", "++", "--", "&&", "||", "==", "!=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^="];

pub(crate) struct Lexed<'a> {
    pub tokens: Vec<Token<'a>>,
    pub line_count: u32,
}

pub(crate) fn lex(src: &str) -> Lexed<'_> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut line: u32 = 1;
    let mut i = if src.starts_with('\u{feff}') { 3 } else { 0 };

    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b'\n' => {
                line += 1;
                i += 1;
            }
            b' ' | b'\t' | b'\r' | b'\x0c' => i += 1,
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'/' if bytes.get(i + 1) == Some(&b'*') => {
                i += 2;
                while i < bytes.len() && !(bytes[i] == b'*' && bytes.get(i + 1) == Some(&b'/')) {
                    if bytes[i] == b'\n' {
                        line += 1;
                    }
                    i += 1;
                }
                i = (i + 2).min(bytes.len());
            }
            b'"' if src[i..].starts_with("\"\"\"") => {
                let start = i;
                let start_line = line;
                i += 3;
                loop {
                    if i >= bytes.len() {
                        break;
                    }
                    if bytes[i] == b'\\' {
                        if bytes.get(i + 1) == Some(&b'\n') {
                            line += 1;
                        }
                        i += 2;
                        continue;
                    }
                    if bytes[i..].starts_with(b"\"\"\"") {
                        i += 3;
                        break;
                    }
                    if bytes[i] == b'\n' {
                        line += 1;
                    }
                    i += 1;
                }
                let i_end = i.min(bytes.len());
                tokens.push(Token { kind: TokenKind::Str, text: &src[start..i_end], line: start_line, end_line: line });
                i = i_end;
            }
            b'"' | b'\'' => {
                let quote = b;
                let start = i;
                i += 1;
                while i < bytes.len() && bytes[i] != quote && bytes[i] != b'\n' {
                    if bytes[i] == b'\\' && i + 1 < bytes.len() && bytes[i + 1] != b'\n' {
                        i += 1;
                    }
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == quote {
                    i += 1;
                }
                tokens.push(Token {
                    kind: if quote == b'"' { TokenKind::Str } else { TokenKind::Char },
                    text: &src[start..i],
                    line,
                    end_line: line,
                });
            }
            b'@' => {
                tokens.push(Token { kind: TokenKind::At, text: "@", line, end_line: line });
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                i = scan_number(bytes, i);
                tokens.push(Token { kind: TokenKind::Number, text: &src[start..i], line, end_line: line });
            }
            b'.' if bytes.get(i + 1).is_some_and(u8::is_ascii_digit) => {
                let start = i;
                i = scan_number(bytes, i + 1);
                tokens.push(Token { kind: TokenKind::Number, text: &src[start..i], line, end_line: line });
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('\u{fffd}');
                if is_ident_start(ch) {
                    let start = i;
                    for c in src[i..].chars() {
                        if is_ident_part(c) {
                            i += c.len_utf8();
                        } else {
                            break;
                        }
                    }
                    tokens.push(Token { kind: TokenKind::Ident, text: &src[start..i], line, end_line: line });
                } else if ch.is_whitespace() {
                    i += ch.len_utf8();
                } else {
                    let len = MULTI_PUNCT.iter().find(|p| src[i..].starts_with(**p)).map_or(ch.len_utf8(), |p| p.len());
                    tokens.push(Token { kind: TokenKind::Punct, text: &src[i..i + len], line, end_line: line });
                    i += len;
                }
            }
        }
    }

    Lexed { tokens, line_count: line }
}

fn scan_number(bytes: &[u8], mut i: usize) -> usize {
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_alphanumeric() || c == b'_' || c == b'.' {
            // exponent sign: 1e-5, 0x1p+3
            if matches!(c, b'e' | b'E' | b'p' | b'P') && matches!(bytes.get(i + 1), Some(b'+') | Some(b'-')) {
                i += 2;
                continue;
            }
            i += 1;
        } else {
            break;
        }
    }
    i
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

fn is_ident_part(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphanumeric()
}

/// Per-line "contains code" flags, index 0 is line 1.
pub(crate) fn code_line_flags(lexed: &Lexed<'_>) -> Vec<bool> {
    let mut flags = vec![false; lexed.line_count as usize];
    for t in &lexed.tokens {
        for l in t.line..=t.end_line {
            if let Some(f) = flags.get_mut(l as usize - 1) {
                *f = true;
            }
        }
    }
    flags
}

/// Joins tokens into the canonical single-spaced form: a space only
/// separates two word-like tokens (or follows a `?` wildcard before a word).
pub(crate) fn join_canonical<'a, I>(tokens: I) -> String
where
    I: IntoIterator<Item = &'a Token<'a>>,
{
    let mut out = String::new();
    let mut prev: Option<&Token<'_>> = None;
    for t in tokens {
        if let Some(p) = prev {
            let needs_space = (p.is_word() || p.is("?") || matches!(p.kind, TokenKind::Str | TokenKind::Char))
                && (t.is_word() || matches!(t.kind, TokenKind::Str | TokenKind::Char));
            // keep `/ /`, `/ *` and `. 5` from re-lexing as comments or numbers
            let would_merge = p.kind == TokenKind::Punct
                && ((p.text.ends_with('/') && (t.text.starts_with('/') || t.text.starts_with('*')))
                    || (p.text.ends_with('.')
                        && t.kind == TokenKind::Number
                        && t.text.starts_with(|c: char| c.is_ascii_digit())));
            if needs_space || would_merge {
                out.push(' ');
            }
        }
        out.push_str(t.text);
        prev = Some(t);
    }
    out
}
