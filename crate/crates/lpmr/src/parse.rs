//! Concrete syntax.
//!
//! ```text
//! c : A.                          declaration
//! def c : A.                      declaration of a definable symbol
//! def c : A := t.                 transparent definition
//! thm c : A := t.                 opaque definition
//! [x, y] lhs --> rhs.             rewrite rule over pattern variables x, y
//! #REQUIRE m.                     splice in module m first
//! #ASSERT t == u.                 require convertibility
//! #CHECK t.                       require typability
//! #EVAL t.                        print the normal form
//! ```
//!
//! Terms: `x : A -> B` and `A -> B` products, `x => t` and `x : A => t`
//! abstractions, juxtaposition application, `Type`, parentheses, and
//! `(; ... ;)` comments (nesting allowed).

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::term::{Name, Term, TermRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    fn at(line: u32, col: u32) -> Self {
        Span { line, col, end_line: line, end_col: col }
    }

    fn to(self, other: Span) -> Self {
        Span {
            line: self.line,
            col: self.col,
            end_line: other.end_line,
            end_col: other.end_col,
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    KwDef,
    KwThm,
    KwType,
    Colon,
    ColonEq,
    Dot,
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Arrow,
    FatArrow,
    LongArrow,
    EqEq,
    PragmaRequire,
    PragmaAssert,
    PragmaCheck,
    PragmaEval,
    Eof,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Token::Ident(n) => return write!(f, "identifier `{n}`"),
            Token::KwDef => "`def`",
            Token::KwThm => "`thm`",
            Token::KwType => "`Type`",
            Token::Colon => "`:`",
            Token::ColonEq => "`:=`",
            Token::Dot => "`.`",
            Token::Comma => "`,`",
            Token::LParen => "`(`",
            Token::RParen => "`)`",
            Token::LBracket => "`[`",
            Token::RBracket => "`]`",
            Token::Arrow => "`->`",
            Token::FatArrow => "`=>`",
            Token::LongArrow => "`-->`",
            Token::EqEq => "`==`",
            Token::PragmaRequire => "`#REQUIRE`",
            Token::PragmaAssert => "`#ASSERT`",
            Token::PragmaCheck => "`#CHECK`",
            Token::PragmaEval => "`#EVAL`",
            Token::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: Span,
    pub message: String,
    /// What the parser would have accepted at this point.
    pub expected: Vec<String>,
}

impl ParseError {
    fn new(span: Span, message: impl Into<String>, expected: Vec<String>) -> Self {
        ParseError { span, message: message.into(), expected }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Pragma {
    Assert(TermRef, TermRef),
    Check(TermRef),
    Eval(TermRef),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedEntry {
    Decl {
        name: Name,
        classifier: TermRef,
        /// Written with `def` but no body; a hint that rules may follow.
        definable: bool,
    },
    Def {
        name: Name,
        classifier: TermRef,
        body: TermRef,
        opaque: bool,
    },
    Rule {
        vars: Vec<Name>,
        lhs: TermRef,
        rhs: TermRef,
    },
    Pragma(Pragma),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SourceFile {
    pub name: String,
    pub requires: Vec<(Name, Span)>,
    pub entries: Vec<(ParsedEntry, Span)>,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

struct Lexer<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, chars: src.char_indices().peekable(), line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<(usize, char)> {
        let next = self.chars.next();
        if let Some((_, c)) = next {
            if c == '\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
        next
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(Span::at(self.line, self.col), msg, vec![])
    }

    fn skip_comment(&mut self) -> Result<(), ParseError> {
        // at call time "(;" has been consumed
        let mut depth = 1u32;
        let (start_line, start_col) = (self.line, self.col);
        while depth > 0 {
            match self.bump() {
                Some((_, '(')) if self.peek() == Some(';') => {
                    self.bump();
                    depth += 1;
                }
                Some((_, ';')) if self.peek() == Some(')') => {
                    self.bump();
                    depth -= 1;
                }
                Some(_) => {}
                None => {
                    return Err(ParseError::new(
                        Span::at(start_line, start_col),
                        "unterminated comment",
                        vec!["`;)`".into()],
                    ))
                }
            }
        }
        Ok(())
    }

    fn tokenize(mut self) -> Result<Vec<(Token, Span)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek(), Some(c) if c.is_whitespace()) {
                self.bump();
            }
            let (line, col) = (self.line, self.col);
            let span = |l: &Lexer<'a>| Span {
                line,
                col,
                end_line: l.line,
                end_col: l.col,
            };
            let Some((start, c)) = self.bump() else {
                out.push((Token::Eof, Span::at(line, col)));
                return Ok(out);
            };
            let tok = match c {
                '(' => {
                    if self.peek() == Some(';') {
                        self.bump();
                        self.skip_comment()?;
                        continue;
                    }
                    Token::LParen
                }
                ')' => Token::RParen,
                '[' => Token::LBracket,
                ']' => Token::RBracket,
                '.' => Token::Dot,
                ',' => Token::Comma,
                ':' => {
                    if self.peek() == Some('=') {
                        self.bump();
                        Token::ColonEq
                    } else {
                        Token::Colon
                    }
                }
                '=' => match self.peek() {
                    Some('>') => {
                        self.bump();
                        Token::FatArrow
                    }
                    Some('=') => {
                        self.bump();
                        Token::EqEq
                    }
                    _ => return Err(self.error("stray `=` (expected `=>` or `==`)")),
                },
                '-' => match self.peek() {
                    Some('-') => {
                        self.bump();
                        if self.peek() == Some('>') {
                            self.bump();
                            Token::LongArrow
                        } else {
                            return Err(self.error("stray `--` (expected `-->`)"));
                        }
                    }
                    Some('>') => {
                        self.bump();
                        Token::Arrow
                    }
                    _ => return Err(self.error("stray `-` (expected `->` or `-->`)")),
                },
                '#' => {
                    let mut word = String::new();
                    while matches!(self.peek(), Some(c) if c.is_ascii_uppercase()) {
                        word.push(self.bump().unwrap().1);
                    }
                    match word.as_str() {
                        "REQUIRE" => Token::PragmaRequire,
                        "ASSERT" => Token::PragmaAssert,
                        "CHECK" => Token::PragmaCheck,
                        "EVAL" => Token::PragmaEval,
                        _ => {
                            return Err(ParseError::new(
                                Span::at(line, col),
                                format!("unknown pragma `#{word}`"),
                                vec![
                                    "`#REQUIRE`".into(),
                                    "`#ASSERT`".into(),
                                    "`#CHECK`".into(),
                                    "`#EVAL`".into(),
                                ],
                            ))
                        }
                    }
                }
                c if is_ident_start(c) => {
                    let mut end = start + c.len_utf8();
                    while matches!(self.peek(), Some(c) if is_ident_char(c)) {
                        let (i, c) = self.bump().unwrap();
                        end = i + c.len_utf8();
                    }
                    match &self.src[start..end] {
                        "def" => Token::KwDef,
                        "thm" => Token::KwThm,
                        "Type" => Token::KwType,
                        name => Token::Ident(name.to_string()),
                    }
                }
                c => return Err(self.error(format!("unexpected character `{c}`"))),
            };
            out.push((tok, span(&self)));
        }
    }
}

struct Parser {
    tokens: Vec<(Token, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn peek2(&self) -> &Token {
        let i = (self.pos + 1).min(self.tokens.len() - 1);
        &self.tokens[i].0
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> (Token, Span) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: &Token) -> Result<Span, ParseError> {
        if self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(ParseError::new(
                self.span(),
                format!("expected {tok}, found {}", self.peek()),
                vec![tok.to_string()],
            ))
        }
    }

    fn expect_ident(&mut self) -> Result<(Name, Span), ParseError> {
        match self.peek().clone() {
            Token::Ident(n) => {
                let span = self.bump().1;
                Ok((n, span))
            }
            other => Err(ParseError::new(
                self.span(),
                format!("expected an identifier, found {other}"),
                vec!["identifier".into()],
            )),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Token::Ident(_) | Token::KwType | Token::LParen)
    }

    fn resolve(&self, name: &str, scope: &[Name], patvars: &HashSet<Name>) -> TermRef {
        if let Some(i) = scope.iter().rev().position(|n| n == name) {
            return Term::bound(i as u32);
        }
        if patvars.contains(name) {
            return Term::var(name);
        }
        Term::con(name)
    }

    fn parse_atom(
        &mut self,
        scope: &mut Vec<Name>,
        patvars: &HashSet<Name>,
    ) -> Result<TermRef, ParseError> {
        match self.peek().clone() {
            Token::Ident(n) => {
                self.bump();
                Ok(self.resolve(&n, scope, patvars))
            }
            Token::KwType => {
                self.bump();
                Ok(Term::sort_type())
            }
            Token::LParen => {
                self.bump();
                let t = self.parse_term(scope, patvars)?;
                self.expect(&Token::RParen)?;
                Ok(t)
            }
            other => Err(ParseError::new(
                self.span(),
                format!("expected a term, found {other}"),
                vec!["identifier".into(), "`Type`".into(), "`(`".into()],
            )),
        }
    }

    fn parse_app(
        &mut self,
        scope: &mut Vec<Name>,
        patvars: &HashSet<Name>,
    ) -> Result<TermRef, ParseError> {
        let mut t = self.parse_atom(scope, patvars)?;
        while self.starts_atom() {
            let arg = self.parse_atom(scope, patvars)?;
            t = Term::app(t, arg);
        }
        Ok(t)
    }

    fn parse_term(
        &mut self,
        scope: &mut Vec<Name>,
        patvars: &HashSet<Name>,
    ) -> Result<TermRef, ParseError> {
        // binder forms: `x : A -> B`, `x : A => t`, `x => t`
        if let Token::Ident(name) = self.peek().clone() {
            match self.peek2() {
                Token::Colon => {
                    self.bump();
                    self.bump();
                    let dom = self.parse_app(scope, patvars)?;
                    match self.peek().clone() {
                        Token::Arrow => {
                            self.bump();
                            scope.push(name.clone());
                            let cod = self.parse_term(scope, patvars)?;
                            scope.pop();
                            return Ok(Term::pi(name, dom, cod));
                        }
                        Token::FatArrow => {
                            self.bump();
                            scope.push(name.clone());
                            let body = self.parse_term(scope, patvars)?;
                            scope.pop();
                            return Ok(Term::lam(name, Some(dom), body));
                        }
                        other => {
                            return Err(ParseError::new(
                                self.span(),
                                format!("expected `->` or `=>` after binder type, found {other}"),
                                vec!["`->`".into(), "`=>`".into()],
                            ))
                        }
                    }
                }
                Token::FatArrow => {
                    self.bump();
                    self.bump();
                    scope.push(name.clone());
                    let body = self.parse_term(scope, patvars)?;
                    scope.pop();
                    return Ok(Term::lam(name, None, body));
                }
                _ => {}
            }
        }
        let head = self.parse_app(scope, patvars)?;
        if self.peek() == &Token::Arrow {
            self.bump();
            scope.push(String::new());
            let cod = self.parse_term(scope, patvars)?;
            scope.pop();
            return Ok(Term::pi("", head, cod));
        }
        Ok(head)
    }

    fn parse_closed_term(&mut self) -> Result<TermRef, ParseError> {
        let mut scope = Vec::new();
        self.parse_term(&mut scope, &HashSet::new())
    }

    fn parse_file(&mut self, name: &str) -> Result<SourceFile, ParseError> {
        let mut file = SourceFile { name: name.to_string(), ..SourceFile::default() };
        loop {
            let start = self.span();
            match self.peek().clone() {
                Token::Eof => return Ok(file),
                Token::PragmaRequire => {
                    self.bump();
                    let (m, mspan) = self.expect_ident()?;
                    self.expect(&Token::Dot)?;
                    file.requires.push((m, mspan));
                }
                Token::PragmaAssert => {
                    self.bump();
                    let t = self.parse_closed_term()?;
                    self.expect(&Token::EqEq)?;
                    let u = self.parse_closed_term()?;
                    let end = self.expect(&Token::Dot)?;
                    file.entries
                        .push((ParsedEntry::Pragma(Pragma::Assert(t, u)), start.to(end)));
                }
                Token::PragmaCheck => {
                    self.bump();
                    let t = self.parse_closed_term()?;
                    let end = self.expect(&Token::Dot)?;
                    file.entries
                        .push((ParsedEntry::Pragma(Pragma::Check(t)), start.to(end)));
                }
                Token::PragmaEval => {
                    self.bump();
                    let t = self.parse_closed_term()?;
                    let end = self.expect(&Token::Dot)?;
                    file.entries
                        .push((ParsedEntry::Pragma(Pragma::Eval(t)), start.to(end)));
                }
                Token::LBracket => {
                    self.bump();
                    let mut vars = Vec::new();
                    if self.peek() != &Token::RBracket {
                        loop {
                            let (v, _) = self.expect_ident()?;
                            vars.push(v);
                            if self.peek() == &Token::Comma {
                                self.bump();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(&Token::RBracket)?;
                    let patvars: HashSet<Name> = vars.iter().cloned().collect();
                    let mut scope = Vec::new();
                    let lhs = self.parse_term(&mut scope, &patvars)?;
                    self.expect(&Token::LongArrow)?;
                    let rhs = self.parse_term(&mut scope, &patvars)?;
                    let end = self.expect(&Token::Dot)?;
                    file.entries
                        .push((ParsedEntry::Rule { vars, lhs, rhs }, start.to(end)));
                }
                Token::KwDef | Token::KwThm => {
                    let opaque = self.peek() == &Token::KwThm;
                    self.bump();
                    let (name, _) = self.expect_ident()?;
                    self.expect(&Token::Colon)?;
                    let classifier = self.parse_closed_term()?;
                    if !opaque && self.peek() == &Token::Dot {
                        let end = self.bump().1;
                        file.entries.push((
                            ParsedEntry::Decl { name, classifier, definable: true },
                            start.to(end),
                        ));
                        continue;
                    }
                    self.expect(&Token::ColonEq)?;
                    let body = self.parse_closed_term()?;
                    let end = self.expect(&Token::Dot)?;
                    file.entries.push((
                        ParsedEntry::Def { name, classifier, body, opaque },
                        start.to(end),
                    ));
                }
                Token::Ident(_) => {
                    let (name, _) = self.expect_ident()?;
                    self.expect(&Token::Colon)?;
                    let classifier = self.parse_closed_term()?;
                    let end = self.expect(&Token::Dot)?;
                    file.entries.push((
                        ParsedEntry::Decl { name, classifier, definable: false },
                        start.to(end),
                    ));
                }
                other => {
                    return Err(ParseError::new(
                        start,
                        format!("expected a declaration, rule or pragma, found {other}"),
                        vec![
                            "identifier".into(),
                            "`def`".into(),
                            "`thm`".into(),
                            "`[`".into(),
                            "pragma".into(),
                        ],
                    ))
                }
            }
        }
    }
}

/// Parses a whole source file. The module name is filled in by the loader.
pub fn parse_file(text: &str) -> Result<SourceFile, ParseError> {
    parse_named_file("", text)
}

pub fn parse_named_file(name: &str, text: &str) -> Result<SourceFile, ParseError> {
    let tokens = Lexer::new(text).tokenize()?;
    Parser { tokens, pos: 0 }.parse_file(name)
}

/// Parses a single term; free identifiers become constants.
pub fn parse_term_str(text: &str) -> Result<TermRef, ParseError> {
    let tokens = Lexer::new(text).tokenize()?;
    let mut p = Parser { tokens, pos: 0 };
    let t = p.parse_closed_term()?;
    p.expect(&Token::Eof)?;
    Ok(t)
}

/// Parses a term in which the given names are free variables rather than
/// constants.
pub fn parse_open_term_str(text: &str, vars: &[&str]) -> Result<TermRef, ParseError> {
    let tokens = Lexer::new(text).tokenize()?;
    let mut p = Parser { tokens, pos: 0 };
    let patvars: HashSet<Name> = vars.iter().map(|s| s.to_string()).collect();
    let mut scope = Vec::new();
    let t = p.parse_term(&mut scope, &patvars)?;
    p.expect(&Token::Eof)?;
    Ok(t)
}
