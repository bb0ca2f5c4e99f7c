//! Lightweight surface parser for Java declarations.
//!
//! Only what schema extraction needs is modelled: package and imports, class
//! headers, annotations, and field declarations. Method and initializer
//! bodies are brace-matched and skipped.

mod lexer;
mod parser;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parser::parse_source;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFile {
    pub path: String,
    pub package_name: String,
    pub imports: Vec<String>,
    pub classes: Vec<ClassDecl>,
    /// Recoverable problems (skipped members or declarations).
    pub diagnostics: Vec<String>,
}

impl SourceFile {
    /// Depth-first walk over every declaration, nested ones included.
    pub fn all_classes(&self) -> Vec<&ClassDecl> {
        fn walk<'a>(c: &'a ClassDecl, out: &mut Vec<&'a ClassDecl>) {
            out.push(c);
            for n in &c.nested {
                walk(n, out);
            }
        }
        let mut out = Vec::new();
        for c in &self.classes {
            walk(c, &mut out);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Class,
    AbstractClass,
    Interface,
    Enum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineSpan {
    pub start: u32,
    pub end: u32,
}

impl LineSpan {
    pub fn lines(&self) -> RangeInclusive<u32> {
        self.start..=self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDecl {
    pub simple_name: String,
    pub qualified_name: String,
    pub kind: ClassKind,
    pub annotations: Vec<AnnotationUse>,
    /// `extends` target as written (canonicalized), classes only.
    pub superclass_name: Option<String>,
    pub fields: Vec<FieldDecl>,
    pub nested: Vec<ClassDecl>,
    pub line_span: LineSpan,
    pub code_line_count: u32,
}

impl ClassDecl {
    pub fn has_annotation(&self, simple_name: &str) -> bool {
        self.annotations.iter().any(|a| a.simple_name == simple_name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modifier {
    Public,
    Protected,
    Private,
    Static,
    Final,
    Transient,
    Volatile,
}

impl Modifier {
    fn from_keyword(word: &str) -> Option<Self> {
        Some(match word {
            "public" => Modifier::Public,
            "protected" => Modifier::Protected,
            "private" => Modifier::Private,
            "static" => Modifier::Static,
            "final" => Modifier::Final,
            "transient" => Modifier::Transient,
            "volatile" => Modifier::Volatile,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDecl {
    pub name: String,
    pub type_text: String,
    pub modifiers: BTreeSet<Modifier>,
    pub annotations: Vec<AnnotationUse>,
    pub initializer_text: Option<String>,
}

impl FieldDecl {
    pub fn has_annotation(&self, simple_name: &str) -> bool {
        self.annotations.iter().any(|a| a.simple_name == simple_name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AnnotationUse {
    pub raw_name: String,
    pub simple_name: String,
    /// Canonical text between the parentheses; `None` for marker use or `()`.
    pub args_text: Option<String>,
}

impl AnnotationUse {
    pub fn new(raw_name: impl Into<String>, args_text: Option<String>) -> Self {
        let raw_name = raw_name.into();
        let simple_name = raw_name.rsplit('.').next().unwrap_or_default().to_string();
        AnnotationUse { raw_name, simple_name, args_text }
    }
}

/// Renders by simple name, so `@Id` and `@com.x.Id` print alike.
impl fmt::Display for AnnotationUse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.args_text {
            Some(args) => write!(f, "@{}({})", self.simple_name, args),
            None => write!(f, "@{}", self.simple_name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unbalanced braces: unexpected `}}` at line {line}")]
    UnexpectedCloseBrace { line: u32 },
    #[error("unbalanced braces: {open} block(s) left open at end of file")]
    UnclosedBrace { open: usize },
}

/// Decodes raw bytes (invalid UTF-8 replaced) and parses them.
pub fn parse_source_bytes(bytes: &[u8], path: &str) -> Result<SourceFile, ParseError> {
    parse_source(&String::from_utf8_lossy(bytes), path)
}

/// Number of lines in `span` holding at least one token outside comments.
///
/// Lines past the end of `text` hold nothing and count zero.
pub fn count_code_lines(text: &str, span: LineSpan) -> u32 {
    let flags = lexer::code_line_flags(&lexer::lex(text));
    count_in(&flags, span)
}

/// Code lines of the whole text.
pub fn count_file_code_lines(text: &str) -> u32 {
    let flags = lexer::code_line_flags(&lexer::lex(text));
    flags.iter().filter(|f| **f).count() as u32
}

pub(crate) fn count_in(flags: &[bool], span: LineSpan) -> u32 {
    debug_assert!(span.start >= 1 && span.start <= span.end);
    span.lines().filter(|l| flags.get(*l as usize - 1).copied().unwrap_or(false)).count() as u32
}

/// Canonical form of a type or expression fragment: tokens re-joined with
/// single spaces only between word-like tokens, comments removed.
pub fn canonicalize(text: &str) -> String {
    let lexed = lexer::lex(text);
    lexer::join_canonical(lexed.tokens.iter())
}
