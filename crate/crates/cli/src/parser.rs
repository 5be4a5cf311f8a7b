//! Line-oriented text format for Lie algebras, representations, Manin
//! triples and fusion programs, with `#` comments. Parse errors carry
//! line and column; unresolved references name the offender.

use starfuse_core::funalg::Edge;
use starfuse_core::moduli::{builtin_program, BuiltinKind, SkeletonGraph, Step, Subspace};
use starfuse_core::rational::{self, Rational};
use starfuse_core::{
    CoreError, FusionProgram, LieAlgebraSpec, ManinTripleData, MatrixGroupModel, Sign,
};
use num_traits::Zero;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

// ---------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Sym(char),
    Arrow,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let bytes: Vec<char> = content.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                out.push(Token { tok: Tok::Ident(bytes[start..i].iter().collect()), line, col });
            } else if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push(Token { tok: Tok::Int(bytes[start..i].iter().collect()), line, col });
            } else if c == '-' && i + 1 < bytes.len() && bytes[i + 1] == '>' {
                out.push(Token { tok: Tok::Arrow, line, col });
                i += 2;
            } else if "{}()[];,=*+-/:.".contains(c) {
                out.push(Token { tok: Tok::Sym(c), line, col });
                i += 1;
            } else {
                return Err(ParseError { line, col, message: format!("unexpected character `{c}`") });
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Source sections (kept for rendering)

#[derive(Debug, Clone, PartialEq)]
pub enum ProgStmt {
    Edge { label: String, source: String, target: String },
    Fuse { p: String, q: String, merged: String },
    Reduce { point: String, subspace: SubspaceExpr, degree: usize },
    Bar { point: String },
    Split { plus: Vec<String>, minus: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SubspaceExpr {
    Span(Vec<Vec<Rational>>),
    Named { manin: String, field: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Section {
    LieAlgebra {
        name: String,
        dim: usize,
        basis: Vec<String>,
        brackets: Vec<(String, String, Vec<(Rational, String)>)>,
        casimir: Vec<(String, String, Rational)>,
    },
    Rep {
        name: String,
        algebra: String,
        dim: usize,
        matrices: Vec<(String, Vec<Vec<Rational>>)>,
    },
    Manin {
        name: String,
        algebra: String,
        h: Vec<Vec<Rational>>,
        hstar: Vec<Vec<Rational>>,
        twist: Option<Vec<Vec<Rational>>>,
    },
    Program {
        name: String,
        algebra: String,
        rep: String,
        statements: Vec<ProgStmt>,
    },
    Builtin {
        name: String,
        kind: String,
        manin: String,
    },
}

/// Parsed file: the sections in source order plus the resolved objects.
#[derive(Debug, Clone)]
pub struct Document {
    pub sections: Vec<Section>,
    pub algebras: Vec<(String, Arc<LieAlgebraSpec>)>,
    pub models: Vec<(String, String, Arc<MatrixGroupModel>)>,
    pub manins: Vec<(String, String, ManinTripleData)>,
    pub programs: Vec<FusionProgram>,
}

impl Document {
    pub fn algebra(&self, name: &str) -> Option<&Arc<LieAlgebraSpec>> {
        self.algebras.iter().find(|(n, _)| n == name).map(|(_, a)| a)
    }

    pub fn model(&self, name: &str) -> Option<&Arc<MatrixGroupModel>> {
        self.models.iter().find(|(n, _, _)| n == name).map(|(_, _, m)| m)
    }

    pub fn manin(&self, name: &str) -> Option<&ManinTripleData> {
        self.manins.iter().find(|(n, _, _)| n == name).map(|(_, _, m)| m)
    }

    pub fn program(&self, name: &str) -> Option<&FusionProgram> {
        self.programs.iter().find(|p| p.name == name)
    }
}

impl PartialEq for Document {
    fn eq(&self, other: &Self) -> bool {
        self.sections == other.sections
            && self.algebras == other.algebras
            && self.models == other.models
            && self.manins.len() == other.manins.len()
            && self
                .manins
                .iter()
                .zip(&other.manins)
                .all(|(a, b)| {
                    a.0 == b.0
                        && a.1 == b.1
                        && a.2.spec == b.2.spec
                        && a.2.h == b.2.h
                        && a.2.h_star == b.2.h_star
                        && a.2.twist == b.2.twist
                })
            && self.programs.len() == other.programs.len()
            && self
                .programs
                .iter()
                .zip(&other.programs)
                .all(|(a, b)| {
                    a.name == b.name
                        && a.model == b.model
                        && a.skeleton == b.skeleton
                        && a.steps == b.steps
                        && a.plus_points == b.plus_points
                        && a.minus_points == b.minus_points
                })
    }
}

// ---------------------------------------------------------------------
// Parser

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self
            .tokens
            .get(self.pos.min(self.tokens.len().saturating_sub(1)))
            .map(|t| (t.line, t.col))
            .unwrap_or((0, 0));
        Err(ParseError { line, col, message: message.into() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        match self.next() {
            Some(Tok::Sym(s)) if s == c => Ok(()),
            other => {
                self.pos = self.pos.saturating_sub(1);
                self.error(format!("expected `{c}`, found {other:?}"))
            }
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            other => {
                self.pos = self.pos.saturating_sub(1);
                self.error(format!("expected identifier, found {other:?}"))
            }
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let id = self.ident()?;
        if id == kw {
            Ok(())
        } else {
            self.pos -= 1;
            self.error(format!("expected `{kw}`, found `{id}`"))
        }
    }

    fn integer(&mut self) -> Result<usize, ParseError> {
        match self.next() {
            Some(Tok::Int(s)) => s.parse().map_err(|_| ParseError {
                line: 0,
                col: 0,
                message: format!("integer out of range: {s}"),
            }),
            other => {
                self.pos = self.pos.saturating_sub(1);
                self.error(format!("expected integer, found {other:?}"))
            }
        }
    }

    /// `p`, `-p`, or `p/q`.
    fn rational(&mut self) -> Result<Rational, ParseError> {
        let negative = self.eat_sym('-');
        let numer = match self.next() {
            Some(Tok::Int(s)) => s,
            other => {
                self.pos = self.pos.saturating_sub(1);
                return self.error(format!("expected rational, found {other:?}"));
            }
        };
        let text = if self.eat_sym('/') {
            let denom = match self.next() {
                Some(Tok::Int(s)) => s,
                other => {
                    self.pos = self.pos.saturating_sub(1);
                    return self.error(format!("expected denominator, found {other:?}"));
                }
            };
            format!("{numer}/{denom}")
        } else {
            numer
        };
        let mut value = match rational::parse(&text) {
            Some(v) => v,
            None => return self.error(format!("bad rational `{text}` (zero denominator?)")),
        };
        if negative {
            value = -value;
        }
        Ok(value)
    }

    /// `(q, q, ...)`.
    fn vector(&mut self) -> Result<Vec<Rational>, ParseError> {
        self.expect_sym('(')?;
        let mut out = Vec::new();
        if !self.eat_sym(')') {
            loop {
                out.push(self.rational()?);
                if self.eat_sym(')') {
                    break;
                }
                self.expect_sym(',')?;
            }
        }
        Ok(out)
    }

    /// `span(vec, ...)`, possibly empty.
    fn span(&mut self) -> Result<Vec<Vec<Rational>>, ParseError> {
        self.keyword("span")?;
        self.expect_sym('(')?;
        let mut out = Vec::new();
        if !self.eat_sym(')') {
            loop {
                out.push(self.vector()?);
                if self.eat_sym(')') {
                    break;
                }
                self.expect_sym(',')?;
            }
        }
        Ok(out)
    }

    /// `[[q, ...], ...]`.
    fn matrix(&mut self) -> Result<Vec<Vec<Rational>>, ParseError> {
        self.expect_sym('[')?;
        let mut rows = Vec::new();
        if !self.eat_sym(']') {
            loop {
                self.expect_sym('[')?;
                let mut row = Vec::new();
                if !self.eat_sym(']') {
                    loop {
                        row.push(self.rational()?);
                        if self.eat_sym(']') {
                            break;
                        }
                        self.expect_sym(',')?;
                    }
                }
                rows.push(row);
                if self.eat_sym(']') {
                    break;
                }
                self.expect_sym(',')?;
            }
        }
        Ok(rows)
    }

    /// Linear combination of basis names: `e1 - 1/2*e2 + 3*e3`, or `0`.
    fn combination(&mut self) -> Result<Vec<(Rational, String)>, ParseError> {
        let mut out = Vec::new();
        let mut sign = Rational::from_integer(1.into());
        let mut first = true;
        loop {
            if !first {
                if self.eat_sym('+') {
                    sign = Rational::from_integer(1.into());
                } else if self.eat_sym('-') {
                    sign = -Rational::from_integer(1.into());
                } else {
                    break;
                }
            } else if self.eat_sym('-') {
                sign = -Rational::from_integer(1.into());
            }
            first = false;
            match self.peek() {
                Some(Tok::Int(_)) => {
                    let q = self.rational()?;
                    if self.eat_sym('*') {
                        let id = self.ident()?;
                        out.push((&sign * &q, id));
                    } else if q.is_zero() {
                        // a bare zero contributes nothing
                    } else {
                        return self.error("a bare nonzero constant cannot appear in a bracket");
                    }
                }
                Some(Tok::Ident(_)) => {
                    let id = self.ident()?;
                    out.push((sign.clone(), id));
                }
                other => return self.error(format!("expected term, found {other:?}")),
            }
        }
        Ok(out)
    }

    fn name_list(&mut self) -> Result<Vec<String>, ParseError> {
        self.expect_sym('(')?;
        let mut out = Vec::new();
        while !self.eat_sym(')') {
            out.push(self.ident()?);
            self.eat_sym(',');
        }
        Ok(out)
    }
}

fn parse_sections(text: &str) -> Result<Vec<Section>, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut sections = Vec::new();
    while p.peek().is_some() {
        let kw = p.ident()?;
        match kw.as_str() {
            "lie_algebra" => {
                let name = p.ident()?;
                p.expect_sym('{')?;
                let mut dim = 0;
                let mut basis = Vec::new();
                let mut brackets = Vec::new();
                let mut casimir = Vec::new();
                while !p.eat_sym('}') {
                    let field = p.ident()?;
                    match field.as_str() {
                        "dim" => {
                            dim = p.integer()?;
                            p.expect_sym(';')?;
                        }
                        "basis" => {
                            while !p.eat_sym(';') {
                                basis.push(p.ident()?);
                            }
                        }
                        "bracket" => {
                            p.expect_sym('[')?;
                            let a = p.ident()?;
                            p.expect_sym(',')?;
                            let b = p.ident()?;
                            p.expect_sym(']')?;
                            p.expect_sym('=')?;
                            let combo = p.combination()?;
                            p.expect_sym(';')?;
                            brackets.push((a, b, combo));
                        }
                        "casimir" => {
                            p.expect_sym('(')?;
                            let a = p.ident()?;
                            p.expect_sym(',')?;
                            let b = p.ident()?;
                            p.expect_sym(')')?;
                            p.expect_sym('=')?;
                            let q = p.rational()?;
                            p.expect_sym(';')?;
                            casimir.push((a, b, q));
                        }
                        other => return p.error(format!("unknown lie_algebra field `{other}`")),
                    }
                }
                sections.push(Section::LieAlgebra { name, dim, basis, brackets, casimir });
            }
            "rep" => {
                let name = p.ident()?;
                p.keyword("of")?;
                let algebra = p.ident()?;
                p.expect_sym('{')?;
                let mut dim = 0;
                let mut matrices = Vec::new();
                while !p.eat_sym('}') {
                    let field = p.ident()?;
                    match field.as_str() {
                        "dim" => {
                            dim = p.integer()?;
                            p.expect_sym(';')?;
                        }
                        "matrix" => {
                            let id = p.ident()?;
                            p.expect_sym('=')?;
                            let m = p.matrix()?;
                            p.expect_sym(';')?;
                            matrices.push((id, m));
                        }
                        other => return p.error(format!("unknown rep field `{other}`")),
                    }
                }
                sections.push(Section::Rep { name, algebra, dim, matrices });
            }
            "manin" => {
                let name = p.ident()?;
                p.keyword("of")?;
                let algebra = p.ident()?;
                p.expect_sym('{')?;
                let mut h = None;
                let mut hstar = None;
                let mut twist = None;
                while !p.eat_sym('}') {
                    let field = p.ident()?;
                    p.expect_sym('=')?;
                    let span = p.span()?;
                    p.expect_sym(';')?;
                    match field.as_str() {
                        "h" => h = Some(span),
                        "hstar" => hstar = Some(span),
                        "twist" => twist = Some(span),
                        other => return p.error(format!("unknown manin field `{other}`")),
                    }
                }
                let (Some(h), Some(hstar)) = (h, hstar) else {
                    return p.error(format!("manin `{name}` needs both h and hstar"));
                };
                sections.push(Section::Manin { name, algebra, h, hstar, twist });
            }
            "program" => {
                let name = p.ident()?;
                p.keyword("over")?;
                let algebra = p.ident()?;
                p.keyword("rep")?;
                let rep = p.ident()?;
                p.expect_sym('{')?;
                let mut statements = Vec::new();
                while !p.eat_sym('}') {
                    let stmt = p.ident()?;
                    match stmt.as_str() {
                        "edge" => {
                            let label = p.ident()?;
                            p.expect_sym(':')?;
                            let source = p.ident()?;
                            match p.next() {
                                Some(Tok::Arrow) => {}
                                other => return p.error(format!("expected `->`, found {other:?}")),
                            }
                            let target = p.ident()?;
                            p.expect_sym(';')?;
                            statements.push(ProgStmt::Edge { label, source, target });
                        }
                        "fuse" => {
                            let a = p.ident()?;
                            let b = p.ident()?;
                            match p.next() {
                                Some(Tok::Arrow) => {}
                                other => return p.error(format!("expected `->`, found {other:?}")),
                            }
                            let merged = p.ident()?;
                            p.expect_sym(';')?;
                            statements.push(ProgStmt::Fuse { p: a, q: b, merged });
                        }
                        "reduce" => {
                            let point = p.ident()?;
                            p.keyword("by")?;
                            let subspace = if matches!(p.peek(), Some(Tok::Ident(s)) if s == "span") {
                                SubspaceExpr::Span(p.span()?)
                            } else {
                                let manin = p.ident()?;
                                p.expect_sym('.')?;
                                let field = p.ident()?;
                                if !["h", "hstar", "twist"].contains(&field.as_str()) {
                                    return p.error(format!("unknown subspace field `{field}`"));
                                }
                                SubspaceExpr::Named { manin, field }
                            };
                            p.keyword("deg")?;
                            let degree = p.integer()?;
                            p.expect_sym(';')?;
                            statements.push(ProgStmt::Reduce { point, subspace, degree });
                        }
                        "bar" => {
                            let point = p.ident()?;
                            p.expect_sym(';')?;
                            statements.push(ProgStmt::Bar { point });
                        }
                        "split" => {
                            p.keyword("plus")?;
                            let plus = p.name_list()?;
                            let minus = if matches!(p.peek(), Some(Tok::Ident(s)) if s == "minus") {
                                p.keyword("minus")?;
                                p.name_list()?
                            } else {
                                Vec::new()
                            };
                            p.expect_sym(';')?;
                            statements.push(ProgStmt::Split { plus, minus });
                        }
                        other => return p.error(format!("unknown program statement `{other}`")),
                    }
                }
                sections.push(Section::Program { name, algebra, rep, statements });
            }
            "builtin" => {
                let name = p.ident()?;
                p.expect_sym('=')?;
                let kind = p.ident()?;
                p.expect_sym('(')?;
                let manin = p.ident()?;
                p.expect_sym(')')?;
                p.expect_sym(';')?;
                sections.push(Section::Builtin { name, kind, manin });
            }
            other => return p.error(format!("unknown section `{other}`")),
        }
    }
    Ok(sections)
}

fn core_err(e: CoreError) -> ParseError {
    ParseError { line: 0, col: 0, message: e.to_string() }
}

fn named_err(message: String) -> ParseError {
    ParseError { line: 0, col: 0, message }
}

/// Parses and resolves a whole document. Cross-reference failures and
/// structurally malformed sections are reported with the offending name.
/// The degree bound seeds the schedules of builtin sections.
pub fn parse(text: &str, degree_bound: usize) -> Result<Document, ParseError> {
    let sections = parse_sections(text)?;
    let mut doc = Document {
        sections: sections.clone(),
        algebras: Vec::new(),
        models: Vec::new(),
        manins: Vec::new(),
        programs: Vec::new(),
    };
    let mut names: BTreeSet<String> = BTreeSet::new();
    let mut fresh = |name: &str| -> Result<(), ParseError> {
        if names.insert(name.to_string()) {
            Ok(())
        } else {
            Err(named_err(format!("duplicate name `{name}`")))
        }
    };
    for section in &sections {
        match section {
            Section::LieAlgebra { name, dim, basis, brackets, casimir } => {
                fresh(name)?;
                if basis.len() != *dim {
                    return Err(named_err(format!(
                        "lie_algebra `{name}`: dim {dim} but {} basis names",
                        basis.len()
                    )));
                }
                let index = |id: &str| -> Result<u8, ParseError> {
                    basis
                        .iter()
                        .position(|b| b == id)
                        .map(|i| i as u8)
                        .ok_or_else(|| named_err(format!("lie_algebra `{name}`: unknown basis element `{id}`")))
                };
                let mut structure = Vec::new();
                let mut seen_pairs = BTreeSet::new();
                for (a, b, combo) in brackets {
                    let (i, j) = (index(a)?, index(b)?);
                    if !seen_pairs.insert((i.min(j), i.max(j))) {
                        return Err(named_err(format!(
                            "lie_algebra `{name}`: bracket [{a},{b}] given twice (one orientation per pair)"
                        )));
                    }
                    for (c, target) in combo {
                        let k = index(target)?;
                        structure.push(((i, j, k), c.clone()));
                        // the opposite order defaults through antisymmetry
                        structure.push(((j, i, k), -c.clone()));
                    }
                }
                let mut t = vec![vec![Rational::zero(); *dim]; *dim];
                for (a, b, q) in casimir {
                    let (i, j) = (index(a)? as usize, index(b)? as usize);
                    t[i][j] = q.clone();
                    if i != j {
                        t[j][i] = q.clone();
                    }
                }
                let spec = LieAlgebraSpec::new(name.clone(), basis.clone(), structure, t).map_err(core_err)?;
                doc.algebras.push((name.clone(), spec));
            }
            Section::Rep { name, algebra, dim, matrices } => {
                fresh(name)?;
                let spec = doc
                    .algebra(algebra)
                    .ok_or_else(|| named_err(format!("rep `{name}`: unknown lie_algebra `{algebra}`")))?
                    .clone();
                let mut rep = vec![vec![vec![Rational::zero(); *dim]; *dim]; spec.dim];
                let mut seen = BTreeSet::new();
                for (id, m) in matrices {
                    let i = spec
                        .basis_names
                        .iter()
                        .position(|b| b == id)
                        .ok_or_else(|| named_err(format!("rep `{name}`: unknown basis element `{id}`")))?;
                    if m.len() != *dim || m.iter().any(|r| r.len() != *dim) {
                        return Err(named_err(format!("rep `{name}`: matrix for `{id}` is not {dim}x{dim}")));
                    }
                    rep[i] = m.clone();
                    seen.insert(i);
                }
                if seen.len() != spec.dim {
                    return Err(named_err(format!("rep `{name}`: needs one matrix per basis element")));
                }
                let model = MatrixGroupModel::new(&spec, rep).map_err(core_err)?;
                doc.models.push((name.clone(), algebra.clone(), model));
            }
            Section::Manin { name, algebra, h, hstar, twist } => {
                fresh(name)?;
                let spec = doc
                    .algebra(algebra)
                    .ok_or_else(|| named_err(format!("manin `{name}`: unknown lie_algebra `{algebra}`")))?
                    .clone();
                let data = ManinTripleData::new(&spec, h.clone(), hstar.clone(), twist.clone()).map_err(core_err)?;
                doc.manins.push((name.clone(), algebra.clone(), data));
            }
            Section::Program { name, algebra, rep, statements } => {
                fresh(name)?;
                if doc.algebra(algebra).is_none() {
                    return Err(named_err(format!("program `{name}`: unknown lie_algebra `{algebra}`")));
                }
                let model = doc
                    .model(rep)
                    .ok_or_else(|| named_err(format!("program `{name}`: unknown rep `{rep}`")))?
                    .clone();
                let mut edges = Vec::new();
                let mut steps = Vec::new();
                let mut plus = Vec::new();
                let mut minus = Vec::new();
                for stmt in statements {
                    match stmt {
                        ProgStmt::Edge { label, source, target } => edges.push(Edge {
                            label: label.clone(),
                            source: source.clone(),
                            target: target.clone(),
                        }),
                        ProgStmt::Fuse { p, q, merged } => steps.push(Step::Fuse {
                            p: p.clone(),
                            q: q.clone(),
                            merged: merged.clone(),
                        }),
                        ProgStmt::Reduce { point, subspace, degree } => {
                            let subspace = match subspace {
                                SubspaceExpr::Span(span) => Subspace { name: "span".into(), span: span.clone() },
                                SubspaceExpr::Named { manin, field } => {
                                    let data = doc
                                        .manin(manin)
                                        .ok_or_else(|| named_err(format!("program `{name}`: unknown manin `{manin}`")))?;
                                    let span = match field.as_str() {
                                        "h" => data.h.clone(),
                                        "hstar" => data.h_star.clone(),
                                        _ => data
                                            .twist
                                            .clone()
                                            .ok_or_else(|| named_err(format!("manin `{manin}` has no twist")))?,
                                    };
                                    Subspace { name: format!("{manin}.{field}"), span }
                                }
                            };
                            steps.push(Step::Reduce { point: point.clone(), subspace, degree_bound: *degree });
                        }
                        ProgStmt::Bar { point } => {
                            steps.push(Step::BarView { point: point.clone(), sign: Sign::Minus })
                        }
                        ProgStmt::Split { plus: p, minus: m } => {
                            plus = p.clone();
                            minus = m.clone();
                        }
                    }
                }
                doc.programs.push(FusionProgram {
                    name: name.clone(),
                    model,
                    skeleton: SkeletonGraph { edges },
                    steps,
                    plus_points: plus,
                    minus_points: minus,
                });
            }
            Section::Builtin { name, kind, manin } => {
                fresh(name)?;
                let kind_parsed = BuiltinKind::parse(kind)
                    .ok_or_else(|| named_err(format!("builtin `{name}`: unknown construction `{kind}`")))?;
                let (_, algebra_name, data) = doc
                    .manins
                    .iter()
                    .find(|(n, _, _)| n == manin)
                    .ok_or_else(|| named_err(format!("builtin `{name}`: unknown manin `{manin}`")))?
                    .clone();
                let matching: Vec<_> = doc.models.iter().filter(|(_, a, _)| *a == algebra_name).collect();
                let model = match matching.as_slice() {
                    [one] => one.2.clone(),
                    [] => {
                        return Err(named_err(format!(
                            "builtin `{name}`: no rep declared for lie_algebra `{algebra_name}`"
                        )))
                    }
                    _ => {
                        return Err(named_err(format!(
                            "builtin `{name}`: ambiguous rep for lie_algebra `{algebra_name}`"
                        )))
                    }
                };
                let program = builtin_program(name, kind_parsed, &data, &model, degree_bound).map_err(core_err)?;
                doc.programs.push(program);
            }
        }
    }
    Ok(doc)
}

// ---------------------------------------------------------------------
// Rendering

fn render_vec(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(rational::render).collect();
    format!("({})", parts.join(", "))
}

fn render_span(span: &[Vec<Rational>]) -> String {
    let parts: Vec<String> = span.iter().map(|v| render_vec(v)).collect();
    format!("span({})", parts.join(", "))
}

/// Canonical text form; parsing the rendering gives back an equal
/// document.
pub fn render(doc: &Document) -> String {
    let mut out = String::new();
    for section in &doc.sections {
        match section {
            Section::LieAlgebra { name, dim, basis, brackets, casimir } => {
                out.push_str(&format!(
                    "lie_algebra {name} {{\n  dim {dim};\n  basis {};\n",
                    basis.join(" ")
                ));
                for (a, b, combo) in brackets {
                    let terms: Vec<String> = combo
                        .iter()
                        .map(|(c, id)| {
                            if c == &Rational::from_integer(1.into()) {
                                id.clone()
                            } else {
                                format!("{}*{}", rational::render(c), id)
                            }
                        })
                        .collect();
                    let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
                    out.push_str(&format!("  bracket [{a},{b}] = {rhs};\n"));
                }
                for (a, b, q) in casimir {
                    out.push_str(&format!("  casimir ({a},{b}) = {};\n", rational::render(q)));
                }
                out.push_str("}\n");
            }
            Section::Rep { name, algebra, dim, matrices } => {
                out.push_str(&format!("rep {name} of {algebra} {{\n  dim {dim};\n"));
                for (id, m) in matrices {
                    let rows: Vec<String> = m
                        .iter()
                        .map(|r| {
                            format!("[{}]", r.iter().map(rational::render).collect::<Vec<_>>().join(", "))
                        })
                        .collect();
                    out.push_str(&format!("  matrix {id} = [{}];\n", rows.join(", ")));
                }
                out.push_str("}\n");
            }
            Section::Manin { name, algebra, h, hstar, twist } => {
                out.push_str(&format!("manin {name} of {algebra} {{\n"));
                out.push_str(&format!("  h = {};\n", render_span(h)));
                out.push_str(&format!("  hstar = {};\n", render_span(hstar)));
                if let Some(t) = twist {
                    out.push_str(&format!("  twist = {};\n", render_span(t)));
                }
                out.push_str("}\n");
            }
            Section::Program { name, algebra, rep, statements } => {
                out.push_str(&format!("program {name} over {algebra} rep {rep} {{\n"));
                for stmt in statements {
                    match stmt {
                        ProgStmt::Edge { label, source, target } => {
                            out.push_str(&format!("  edge {label}: {source} -> {target};\n"));
                        }
                        ProgStmt::Fuse { p, q, merged } => {
                            out.push_str(&format!("  fuse {p} {q} -> {merged};\n"));
                        }
                        ProgStmt::Reduce { point, subspace, degree } => {
                            let sub = match subspace {
                                SubspaceExpr::Span(span) => render_span(span),
                                SubspaceExpr::Named { manin, field } => format!("{manin}.{field}"),
                            };
                            out.push_str(&format!("  reduce {point} by {sub} deg {degree};\n"));
                        }
                        ProgStmt::Bar { point } => out.push_str(&format!("  bar {point};\n")),
                        ProgStmt::Split { plus, minus } => {
                            out.push_str(&format!("  split plus({})", plus.join(" ")));
                            if !minus.is_empty() {
                                out.push_str(&format!(" minus({})", minus.join(" ")));
                            }
                            out.push_str(";\n");
                        }
                    }
                }
                out.push_str("}\n");
            }
            Section::Builtin { name, kind, manin } => {
                out.push_str(&format!("builtin {name} = {kind}({manin});\n"));
            }
        }
    }
    out
}
