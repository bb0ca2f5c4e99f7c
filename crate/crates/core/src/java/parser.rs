use std::collections::BTreeSet;

use super::lexer::{self, Token, TokenKind};
use super::{count_in, AnnotationUse, ClassDecl, ClassKind, FieldDecl, LineSpan, Modifier, ParseError, SourceFile};

const PRIMITIVES: &[&str] = &["boolean", "byte", "char", "short", "int", "long", "float", "double", "void", "var"];

const RESERVED: &[&str] = &[
    "abstract",
    "assert",
    "break",
    "case",
    "catch",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "else",
    "enum",
    "extends",
    "finally",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "interface",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "volatile",
    "while",
    "true",
    "false",
    "null",
    "final",
];

/// Modifiers that are accepted but not recorded.
const IGNORED_MODIFIERS: &[&str] = &["abstract", "native", "synchronized", "strictfp", "default", "sealed"];

#[derive(Debug)]
struct Fail {
    line: u32,
    message: String,
}

type PResult<T> = Result<T, Fail>;

/// Parses one Java compilation unit.
///
/// Declarations that cannot be understood are skipped with a diagnostic;
/// only a file whose braces do not balance is rejected outright.
pub fn parse_source(text: &str, path: &str) -> Result<SourceFile, ParseError> {
    let lexed = lexer::lex(text);
    check_braces(&lexed.tokens)?;
    let flags = lexer::code_line_flags(&lexed);
    let mut p = Parser { toks: &lexed.tokens, pos: 0, flags: &flags, diagnostics: Vec::new(), nesting: 0 };
    let (package_name, imports, classes) = p.compilation_unit();
    Ok(SourceFile { path: path.to_string(), package_name, imports, classes, diagnostics: p.diagnostics })
}

fn check_braces(tokens: &[Token<'_>]) -> Result<(), ParseError> {
    let mut depth = 0usize;
    for t in tokens {
        if t.is("{") {
            depth += 1;
        } else if t.is("}") {
            if depth == 0 {
                return Err(ParseError::UnexpectedCloseBrace { line: t.line });
            }
            depth -= 1;
        }
    }
    if depth == 0 {
        Ok(())
    } else {
        Err(ParseError::UnclosedBrace { open: depth })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum DeclKeyword {
    Class,
    Interface,
    Enum,
    Record,
    AnnotationType,
}

struct Parser<'t, 'a> {
    toks: &'t [Token<'a>],
    pos: usize,
    flags: &'t [bool],
    diagnostics: Vec<String>,
    nesting: usize,
}

/// Deeper member declarations are skipped rather than recursed into.
const MAX_NESTING: usize = 64;

impl<'t, 'a> Parser<'t, 'a> {
    fn peek(&self) -> Option<&'t Token<'a>> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, k: usize) -> Option<&'t Token<'a>> {
        self.toks.get(self.pos + k)
    }

    fn at(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.is(text))
    }

    fn bump(&mut self) -> Option<&'t Token<'a>> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn line(&self) -> u32 {
        self.peek().or_else(|| self.toks.last()).map_or(1, |t| t.line)
    }

    fn fail<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(Fail { line: self.line(), message: message.into() })
    }

    fn expect(&mut self, text: &str) -> PResult<()> {
        if self.at(text) {
            self.pos += 1;
            Ok(())
        } else {
            let found = self.peek().map_or("end of file", |t| t.text);
            self.fail(format!("expected `{text}`, found `{found}`"))
        }
    }

    fn ident(&mut self) -> PResult<&'a str> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident && !RESERVED.contains(&t.text) => {
                self.pos += 1;
                Ok(t.text)
            }
            Some(t) => self.fail(format!("expected identifier, found `{}`", t.text)),
            None => self.fail("expected identifier, found end of file"),
        }
    }

    fn diag(&mut self, f: Fail) {
        self.diagnostics.push(format!("line {}: {}", f.line, f.message));
    }

    fn compilation_unit(&mut self) -> (String, Vec<String>, Vec<ClassDecl>) {
        let mut package = String::new();
        let mut imports = Vec::new();
        let mut classes = Vec::new();

        while self.peek().is_some() {
            if self.at(";") {
                self.pos += 1;
                continue;
            }
            let start = self.pos;
            let result = if self.at("package") {
                self.package_decl().map(|p| package = p)
            } else if self.at("import") {
                self.import_decl().map(|i| imports.push(i))
            } else if self.at("@")
                && self.peek_at(2).is_some_and(|t| t.is("package") || t.is("."))
                && self.package_ahead()
            {
                // annotated package declaration (package-info.java)
                self.skip_annotations_then_package().map(|p| package = p)
            } else {
                self.type_decl(&package).map(|d| classes.extend(d))
            };
            if let Err(f) = result {
                self.diag(f);
                self.pos = start;
                self.skip_segment();
            }
        }
        (package, imports, classes)
    }

    fn package_ahead(&self) -> bool {
        let mut i = self.pos;
        while let Some(t) = self.toks.get(i) {
            if t.is("package") {
                return true;
            }
            if t.is("{") || t.is(";") || t.is("class") || t.is("interface") || t.is("enum") {
                return false;
            }
            i += 1;
        }
        false
    }

    fn skip_annotations_then_package(&mut self) -> PResult<String> {
        while self.at("@") {
            self.annotation()?;
        }
        self.package_decl()
    }

    fn package_decl(&mut self) -> PResult<String> {
        self.expect("package")?;
        let name = self.dotted(false)?;
        self.expect(";")?;
        Ok(name)
    }

    fn import_decl(&mut self) -> PResult<String> {
        self.expect("import")?;
        if self.at("static") {
            self.pos += 1;
        }
        let name = self.dotted(true)?;
        self.expect(";")?;
        Ok(name)
    }

    fn dotted(&mut self, allow_star: bool) -> PResult<String> {
        let mut name = self.ident()?.to_string();
        while self.at(".") {
            self.pos += 1;
            if allow_star && self.at("*") {
                self.pos += 1;
                name.push_str(".*");
                break;
            }
            name.push('.');
            name.push_str(self.ident()?);
        }
        Ok(name)
    }

    /// Advances past one top-level segment: up to a `;` or a whole `{...}` group.
    fn skip_segment(&mut self) {
        let start = self.pos;
        while let Some(t) = self.peek() {
            if t.is(";") {
                self.pos += 1;
                break;
            }
            if t.is("{") {
                self.skip_braces();
                break;
            }
            if t.is("}") {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start && self.peek().is_some() {
            self.pos += 1;
        }
    }

    /// Member-level recovery: never consumes the enclosing body's `}`.
    fn skip_member(&mut self) {
        let start = self.pos;
        while let Some(t) = self.peek() {
            if t.is("}") {
                break;
            }
            if t.is(";") {
                self.pos += 1;
                break;
            }
            if t.is("{") {
                self.skip_braces();
                break;
            }
            self.pos += 1;
        }
        if self.pos == start && self.peek().is_some_and(|t| !t.is("}")) {
            self.pos += 1;
        }
    }

    /// At `{`: skips to just past the matching `}`. Braces are known to balance.
    fn skip_braces(&mut self) {
        let mut depth = 0usize;
        while let Some(t) = self.bump() {
            if t.is("{") {
                depth += 1;
            } else if t.is("}") {
                depth = depth.saturating_sub(1);
                if depth == 0 {
                    return;
                }
            }
        }
    }

    /// At `(` or `[`: skips the group, brace groups inside it wholesale.
    fn skip_group(&mut self) -> PResult<()> {
        let (open, close) = if self.at("(") { ("(", ")") } else { ("[", "]") };
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            if t.is("{") {
                self.skip_braces();
                continue;
            }
            if t.is("}") || t.is(";") {
                return self.fail(format!("unclosed `{open}`"));
            }
            self.pos += 1;
            if t.is(open) {
                depth += 1;
            } else if t.is(close) {
                depth -= 1;
                if depth == 0 {
                    return Ok(());
                }
            }
        }
        self.fail(format!("unclosed `{open}`"))
    }

    /// At `<`: skips a type-parameter or type-argument list.
    fn skip_angles(&mut self) -> PResult<()> {
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            if t.is("<") {
                depth += 1;
            } else if t.is(">") {
                depth -= 1;
                if depth == 0 {
                    self.pos += 1;
                    return Ok(());
                }
            } else if t.is("(") {
                self.skip_group()?;
                continue;
            } else if t.is(";") || t.is("{") || t.is("}") || t.is(")") || t.is("=") {
                return self.fail("unclosed `<`");
            }
            self.pos += 1;
        }
        self.fail("unclosed `<`")
    }

    fn annotation(&mut self) -> PResult<AnnotationUse> {
        self.expect("@")?;
        let mut raw = self.ident()?.to_string();
        while self.at(".") && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Ident) {
            self.pos += 1;
            raw.push('.');
            raw.push_str(self.ident()?);
        }
        let mut args = None;
        if self.at("(") {
            let inner_start = self.pos + 1;
            self.skip_group()?;
            let inner = &self.toks[inner_start..self.pos - 1];
            if !inner.is_empty() {
                args = Some(lexer::join_canonical(inner.iter()));
            }
        }
        Ok(AnnotationUse::new(raw, args))
    }

    fn modifiers(&mut self) -> PResult<(Vec<AnnotationUse>, BTreeSet<Modifier>, bool)> {
        let mut annotations = Vec::new();
        let mut modifiers = BTreeSet::new();
        let mut is_abstract = false;
        while let Some(t) = self.peek() {
            if t.is("@") {
                if self.peek_at(1).is_some_and(|n| n.is("interface")) {
                    break;
                }
                annotations.push(self.annotation()?);
            } else if t.kind == TokenKind::Ident {
                if let Some(m) = Modifier::from_keyword(t.text) {
                    modifiers.insert(m);
                } else if t.text == "abstract" {
                    is_abstract = true;
                } else if IGNORED_MODIFIERS.contains(&t.text)
                    && self.peek_at(1).is_some_and(|n| n.kind == TokenKind::Ident || n.is("@") || n.is("<"))
                {
                    // accepted, not recorded
                } else if t.text == "non"
                    && self.peek_at(1).is_some_and(|n| n.is("-"))
                    && self.peek_at(2).is_some_and(|n| n.is("sealed"))
                {
                    self.pos += 2;
                } else {
                    break;
                }
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((annotations, modifiers, is_abstract))
    }

    fn decl_keyword(&self) -> Option<DeclKeyword> {
        let t = self.peek()?;
        if t.is("@") {
            return self.peek_at(1).filter(|n| n.is("interface")).map(|_| DeclKeyword::AnnotationType);
        }
        if t.kind != TokenKind::Ident {
            return None;
        }
        match t.text {
            "class" => Some(DeclKeyword::Class),
            "interface" => Some(DeclKeyword::Interface),
            "enum" => Some(DeclKeyword::Enum),
            // contextual keyword: `record Name(`
            "record"
                if self.peek_at(1).is_some_and(|n| n.kind == TokenKind::Ident)
                    && self.peek_at(2).is_some_and(|n| n.is("(") || n.is("<")) =>
            {
                Some(DeclKeyword::Record)
            }
            _ => None,
        }
    }

    /// Parses one type declaration. Records and annotation types are skipped
    /// and yield `None`.
    fn type_decl(&mut self, prefix: &str) -> PResult<Option<ClassDecl>> {
        let start_line = self.line();
        let (annotations, _modifiers, is_abstract) = self.modifiers()?;
        let Some(keyword) = self.decl_keyword() else {
            let found = self.peek().map_or("end of file", |t| t.text);
            return self.fail(format!("expected a type declaration, found `{found}`"));
        };
        self.pos += if keyword == DeclKeyword::AnnotationType { 2 } else { 1 };
        let simple_name = self.ident()?.to_string();
        let qualified_name = if prefix.is_empty() { simple_name.clone() } else { format!("{prefix}.{simple_name}") };

        let mut superclass_name = None;
        match keyword {
            DeclKeyword::Class => {
                if self.at("<") {
                    self.skip_angles()?;
                }
                while !self.at("{") {
                    if self.at("extends") {
                        self.pos += 1;
                        superclass_name = Some(self.type_text()?);
                    } else if self.at("implements") || self.at("permits") {
                        self.pos += 1;
                        self.type_text()?;
                        while self.at(",") {
                            self.pos += 1;
                            self.type_text()?;
                        }
                    } else {
                        let found = self.peek().map_or("end of file", |t| t.text);
                        return self.fail(format!("unexpected `{found}` in header of class {simple_name}"));
                    }
                }
            }
            DeclKeyword::Record => {
                if self.at("<") {
                    self.skip_angles()?;
                }
                if !self.at("(") {
                    return self.fail("expected record components");
                }
                self.skip_group()?;
                self.skip_to_body()?;
                self.skip_braces();
                return Ok(None);
            }
            DeclKeyword::AnnotationType => {
                self.skip_to_body()?;
                self.skip_braces();
                return Ok(None);
            }
            DeclKeyword::Interface | DeclKeyword::Enum => self.skip_to_body()?,
        }

        self.expect("{")?;
        let kind = match keyword {
            DeclKeyword::Interface => ClassKind::Interface,
            DeclKeyword::Enum => ClassKind::Enum,
            _ if is_abstract => ClassKind::AbstractClass,
            _ => ClassKind::Class,
        };
        let (fields, nested, end_line) = self.class_body(kind == ClassKind::Enum, &qualified_name)?;
        let line_span = LineSpan { start: start_line, end: end_line };
        Ok(Some(ClassDecl {
            simple_name,
            qualified_name,
            kind,
            annotations,
            superclass_name,
            fields,
            nested,
            line_span,
            code_line_count: count_in(self.flags, line_span),
        }))
    }

    /// Skips header tokens up to (not including) the body's `{`.
    fn skip_to_body(&mut self) -> PResult<()> {
        while let Some(t) = self.peek() {
            if t.is("{") {
                return Ok(());
            }
            if t.is(";") || t.is("}") {
                break;
            }
            if t.is("(") {
                self.skip_group()?;
            } else {
                self.pos += 1;
            }
        }
        self.fail("expected declaration body")
    }

    fn class_body(&mut self, is_enum: bool, qualified: &str) -> PResult<(Vec<FieldDecl>, Vec<ClassDecl>, u32)> {
        let mut fields = Vec::new();
        let mut nested = Vec::new();

        if is_enum {
            while let Some(t) = self.peek() {
                if t.is(";") {
                    self.pos += 1;
                    break;
                }
                if t.is("}") {
                    break;
                }
                if t.is("{") {
                    self.skip_braces();
                } else if t.is("(") {
                    self.skip_group()?;
                } else {
                    self.pos += 1;
                }
            }
        }

        loop {
            let Some(t) = self.peek() else {
                return self.fail(format!("unexpected end of file in body of {qualified}"));
            };
            if t.is("}") {
                self.pos += 1;
                return Ok((fields, nested, t.line));
            }
            if t.is(";") {
                self.pos += 1;
                continue;
            }
            if t.is("{") {
                self.skip_braces();
                continue;
            }
            let start = self.pos;
            if let Err(f) = self.member(qualified, &mut fields, &mut nested) {
                self.diag(f);
                self.pos = start;
                self.skip_member();
            }
        }
    }

    fn member(&mut self, qualified: &str, fields: &mut Vec<FieldDecl>, nested: &mut Vec<ClassDecl>) -> PResult<()> {
        let start = self.pos;
        let (annotations, modifiers, _) = self.modifiers()?;
        if self.at("{") {
            self.skip_braces();
            return Ok(());
        }
        if self.decl_keyword().is_some() {
            if self.nesting >= MAX_NESTING {
                return self.fail(format!("declarations nested deeper than {MAX_NESTING} levels are skipped"));
            }
            self.pos = start;
            self.nesting += 1;
            let decl = self.type_decl(qualified);
            self.nesting -= 1;
            if let Some(decl) = decl? {
                nested.push(decl);
            }
            return Ok(());
        }
        if self.at("<") {
            self.skip_angles()?;
        }
        let type_text = self.type_text()?;
        if self.at("(") {
            // constructor
            self.skip_group()?;
            return self.skip_method_tail();
        }
        let mut name = self.ident()?;
        if self.at("(") {
            self.skip_group()?;
            return self.skip_method_tail();
        }

        loop {
            let mut ty = type_text.clone();
            while self.at("[") && self.peek_at(1).is_some_and(|t| t.is("]")) {
                self.pos += 2;
                ty.push_str("[]");
            }
            let initializer_text = if self.at("=") {
                self.pos += 1;
                Some(self.initializer()?)
            } else {
                None
            };
            fields.push(FieldDecl {
                name: name.to_string(),
                type_text: ty,
                modifiers: modifiers.clone(),
                annotations: annotations.clone(),
                initializer_text,
            });
            if self.at(",") {
                self.pos += 1;
                name = self.ident()?;
                continue;
            }
            return self.expect(";");
        }
    }

    fn skip_method_tail(&mut self) -> PResult<()> {
        while let Some(t) = self.peek() {
            if t.is("{") {
                self.skip_braces();
                return Ok(());
            }
            if t.is(";") {
                self.pos += 1;
                return Ok(());
            }
            if t.is("}") {
                break;
            }
            if t.is("(") {
                self.skip_group()?;
            } else {
                self.pos += 1;
            }
        }
        self.fail("method declaration without body or `;`")
    }

    /// Parses a type reference and returns its canonical text.
    fn type_text(&mut self) -> PResult<String> {
        let start = self.pos;
        while self.at("@") {
            self.annotation()?;
        }
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident && PRIMITIVES.contains(&t.text) => self.pos += 1,
            _ => {
                self.ident()?;
            }
        }
        loop {
            if self.at("<") {
                self.skip_angles()?;
            }
            if self.at(".") && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Ident) {
                self.pos += 2;
                continue;
            }
            break;
        }
        while self.at("[") && self.peek_at(1).is_some_and(|t| t.is("]")) {
            self.pos += 2;
        }
        Ok(lexer::join_canonical(self.toks[start..self.pos].iter()))
    }

    /// Field initializer up to the declarator's `,` or `;`.
    fn initializer(&mut self) -> PResult<String> {
        let start = self.pos;
        let mut angle = 0usize;
        while let Some(t) = self.peek() {
            if t.is(";") {
                break;
            }
            if t.is(",") && angle == 0 {
                break;
            }
            if t.is("}") || t.is(")") || t.is("]") {
                return self.fail("unbalanced initializer");
            }
            if t.is("{") {
                self.skip_braces();
                continue;
            }
            if t.is("(") || t.is("[") {
                self.skip_group()?;
                continue;
            }
            if t.is("<")
                && self.pos > start
                && self.toks[self.pos - 1].kind == TokenKind::Ident
                && self.closes_generic()
            {
                angle += 1;
            } else if t.is(">") && angle > 0 {
                angle -= 1;
            }
            self.pos += 1;
        }
        if self.pos == start {
            return self.fail("empty initializer");
        }
        Ok(lexer::join_canonical(self.toks[start..self.pos].iter()))
    }

    /// Whether the `<` at the cursor looks like the start of type arguments.
    fn closes_generic(&self) -> bool {
        for t in &self.toks[self.pos + 1..] {
            if t.is(">") {
                return true;
            }
            if t.is(";") || t.is("(") || t.is(")") || t.is("{") || t.is("}") || t.is("=") || t.is("&&") || t.is("||") {
                return false;
            }
        }
        false
    }
}
