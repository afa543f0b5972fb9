//! Surface grammar: workspace files, term and type parsing, elaboration,
//! and the frame file format.
//!
//! ```text
//! decl  := "state" IDENT ":" (NAT|"omega") ";" | "entity" IDENT ";"
//!        | "const" IDENT ":" type ";" | "free" VARTOK ":" type ";"
//!        | "let" IDENT "=" term ";"
//! type  := IDENT | type "->" type (right assoc) | "(" type ")"
//! term  := VARTOK | IDENT | "\" VARTOK ":" type "." term
//!        | term term (left assoc) | "(" term ")"
//! VARTOK := "v" NAT     comments: # to end of line
//! ```
//!
//! Combinator literals `K[A,B]`, `C[A,B,C]`, `D[c;A,B,C]`, `W[A,B]`,
//! `B[A,B,C]`, `S[A,B,C]`, `I[A]` elaborate to combinator instances. A
//! variable occurrence resolves to the innermost enclosing binder with the
//! same token, else to a unique `free` declaration.

use std::collections::BTreeMap;
use std::fmt;

use serde::Deserialize;
use thiserror::Error;

use crate::cl::ClTerm;
use crate::comb::{CombKind, CombinatorSpec};
use crate::combinator::mk_lambda_combinator;
use crate::semantics::{DecoratedFrame, Elem, TypeUniverse};
use crate::term::{check_var, Term, Var};
use crate::types::{Budget, Parameter, Signature, Type};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("{pos}: {msg}")]
    Parse { pos: Pos, msg: String },
    #[error("{pos}: {msg}")]
    Elab { pos: Pos, msg: String },
}

impl SyntaxError {
    fn parse(pos: Pos, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::Parse { pos, msg: msg.into() }
    }
    fn elab(pos: Pos, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::Elab { pos, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    VarTok(u32),
    Nat(u64),
    Lambda,
    Colon,
    Dot,
    Semi,
    Arrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Equals,
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, SyntaxError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().expect("peeked");
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump(&mut chars);
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
            }
            '\\' => {
                bump(&mut chars);
                out.push((Tok::Lambda, pos));
            }
            ':' => {
                bump(&mut chars);
                out.push((Tok::Colon, pos));
            }
            '.' => {
                bump(&mut chars);
                out.push((Tok::Dot, pos));
            }
            ';' => {
                bump(&mut chars);
                out.push((Tok::Semi, pos));
            }
            '(' => {
                bump(&mut chars);
                out.push((Tok::LParen, pos));
            }
            ')' => {
                bump(&mut chars);
                out.push((Tok::RParen, pos));
            }
            '[' => {
                bump(&mut chars);
                out.push((Tok::LBracket, pos));
            }
            ']' => {
                bump(&mut chars);
                out.push((Tok::RBracket, pos));
            }
            ',' => {
                bump(&mut chars);
                out.push((Tok::Comma, pos));
            }
            '=' => {
                bump(&mut chars);
                out.push((Tok::Equals, pos));
            }
            '-' => {
                bump(&mut chars);
                match chars.peek() {
                    Some('>') => {
                        bump(&mut chars);
                        out.push((Tok::Arrow, pos));
                    }
                    _ => return Err(SyntaxError::parse(pos, "expected `->`")),
                }
            }
            c if c.is_ascii_digit() => {
                let mut n: u64 = 0;
                while let Some(&d) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    n = n * 10 + (bump(&mut chars) as u64 - '0' as u64);
                }
                out.push((Tok::Nat(n), pos));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if !(d.is_ascii_alphanumeric() || d == '_') {
                        break;
                    }
                    s.push(bump(&mut chars));
                }
                // v<digits> is a variable token.
                if let Some(rest) = s.strip_prefix('v') {
                    if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
                        let idx: u32 = rest.parse().map_err(|_| {
                            SyntaxError::parse(pos, "variable index out of range")
                        })?;
                        out.push((Tok::VarTok(idx), pos));
                        continue;
                    }
                }
                out.push((Tok::Ident(s), pos));
            }
            other => return Err(SyntaxError::parse(pos, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum RawType {
    Atom(String, Pos),
    Arrow(Box<RawType>, Box<RawType>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum RawTerm {
    Var(u32, Pos),
    Ident(String, Pos),
    Lam(u32, RawType, Box<RawTerm>, Pos),
    App(Box<RawTerm>, Box<RawTerm>),
    Comb(CombKind, Option<String>, Vec<RawType>, Pos),
}

impl RawTerm {
    pub fn pos(&self) -> Pos {
        match self {
            RawTerm::Var(_, p)
            | RawTerm::Ident(_, p)
            | RawTerm::Lam(_, _, _, p)
            | RawTerm::Comb(_, _, _, p) => *p,
            RawTerm::App(f, _) => f.pos(),
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(Tok, Pos)> {
        self.toks.get(self.at)
    }

    fn pos(&self) -> Pos {
        self.peek().map(|(_, p)| *p).unwrap_or(Pos { line: 0, col: 0 })
    }

    fn next(&mut self) -> Option<(Tok, Pos)> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Pos, SyntaxError> {
        match self.next() {
            Some((t, p)) if t == tok => Ok(p),
            Some((t, p)) => Err(SyntaxError::parse(p, format!("expected {what}, found {t:?}"))),
            None => Err(SyntaxError::parse(self.pos(), format!("expected {what}, found end"))),
        }
    }

    fn parse_type(&mut self) -> Result<RawType, SyntaxError> {
        let lhs = self.parse_type_atom()?;
        if matches!(self.peek(), Some((Tok::Arrow, _))) {
            self.next();
            let rhs = self.parse_type()?;
            Ok(RawType::Arrow(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn parse_type_atom(&mut self) -> Result<RawType, SyntaxError> {
        match self.next() {
            Some((Tok::Ident(name), p)) => Ok(RawType::Atom(name, p)),
            Some((Tok::LParen, _)) => {
                let t = self.parse_type()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Some((t, p)) => Err(SyntaxError::parse(p, format!("expected a type, found {t:?}"))),
            None => Err(SyntaxError::parse(self.pos(), "expected a type, found end")),
        }
    }

    fn parse_term(&mut self) -> Result<RawTerm, SyntaxError> {
        let mut head = self.parse_term_atom()?;
        loop {
            match self.peek() {
                Some((Tok::VarTok(_) | Tok::Ident(_) | Tok::LParen | Tok::Lambda, _)) => {
                    // A lambda in argument position must be parenthesized,
                    // but a trailing lambda continues an application the
                    // usual way: f \v. body parses as f (\v. body).
                    let arg = self.parse_term_atom()?;
                    head = RawTerm::App(Box::new(head), Box::new(arg));
                }
                _ => return Ok(head),
            }
        }
    }

    fn parse_term_atom(&mut self) -> Result<RawTerm, SyntaxError> {
        match self.next() {
            Some((Tok::VarTok(i), p)) => Ok(RawTerm::Var(i, p)),
            Some((Tok::Ident(name), p)) => {
                if matches!(self.peek(), Some((Tok::LBracket, _))) {
                    return self.parse_comb(name, p);
                }
                Ok(RawTerm::Ident(name, p))
            }
            Some((Tok::Lambda, p)) => {
                let (idx, _) = match self.next() {
                    Some((Tok::VarTok(i), q)) => (i, q),
                    Some((t, q)) => {
                        return Err(SyntaxError::parse(
                            q,
                            format!("expected a variable token after `\\`, found {t:?}"),
                        ))
                    }
                    None => return Err(SyntaxError::parse(p, "expected a variable token")),
                };
                self.expect(Tok::Colon, "`:`")?;
                let ty = self.parse_type()?;
                self.expect(Tok::Dot, "`.`")?;
                let body = self.parse_term()?;
                Ok(RawTerm::Lam(idx, ty, Box::new(body), p))
            }
            Some((Tok::LParen, _)) => {
                let t = self.parse_term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Some((t, p)) => Err(SyntaxError::parse(p, format!("expected a term, found {t:?}"))),
            None => Err(SyntaxError::parse(self.pos(), "expected a term, found end")),
        }
    }

    fn parse_comb(&mut self, name: String, pos: Pos) -> Result<RawTerm, SyntaxError> {
        let kind = match name.as_str() {
            "I" => CombKind::I,
            "K" => CombKind::K,
            "C" => CombKind::C,
            "D" => CombKind::D,
            "W" => CombKind::W,
            "B" => CombKind::B,
            "S" => CombKind::S,
            _ => {
                return Err(SyntaxError::parse(
                    pos,
                    format!("`{name}` is not a combinator letter"),
                ))
            }
        };
        self.expect(Tok::LBracket, "`[`")?;
        let mut dconst = None;
        if kind == CombKind::D {
            match self.next() {
                Some((Tok::Ident(c), _)) => dconst = Some(c),
                Some((t, p)) => {
                    return Err(SyntaxError::parse(
                        p,
                        format!("expected the Dardinal constant, found {t:?}"),
                    ))
                }
                None => return Err(SyntaxError::parse(pos, "expected the Dardinal constant")),
            }
            self.expect(Tok::Semi, "`;`")?;
        }
        let mut tys = vec![self.parse_type()?];
        while matches!(self.peek(), Some((Tok::Comma, _))) {
            self.next();
            tys.push(self.parse_type()?);
        }
        self.expect(Tok::RBracket, "`]`")?;
        if tys.len() != kind.arity() {
            return Err(SyntaxError::parse(
                pos,
                format!("{name} takes {} type parameters, found {}", kind.arity(), tys.len()),
            ));
        }
        Ok(RawTerm::Comb(kind, dconst, tys, pos))
    }
}

/// Declarations of a workspace file: atoms with budgets, a signature, free
/// variable declarations, and named terms.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub state_atoms: Vec<String>,
    pub entity_atoms: Vec<String>,
    pub upsilon: Parameter,
    pub sig: Signature,
    pub frees: BTreeMap<u32, Type>,
    pub lets: Vec<(String, RawTerm)>,
}

impl Workspace {
    pub fn atom(&self, name: &str) -> Option<Type> {
        if self.state_atoms.iter().any(|a| a == name) {
            Some(Type::state(name))
        } else if self.entity_atoms.iter().any(|a| a == name) {
            Some(Type::entity(name))
        } else {
            None
        }
    }

    pub fn lookup_let(&self, name: &str) -> Option<&RawTerm> {
        self.lets.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }
}

/// Which system elaboration targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemMode {
    /// The modal calculus at the workspace parameter.
    Modal,
    /// The modal calculus with every budget suspended (the maximal system).
    ModalOmega,
    /// The ordinary simply-typed calculus: arrows unrestricted.
    Full,
}

/// Parses a workspace file.
pub fn parse_workspace(src: &str) -> Result<Workspace, SyntaxError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0 };
    let mut ws = Workspace::default();
    while let Some((tok, pos)) = p.next() {
        let Tok::Ident(kw) = tok else {
            return Err(SyntaxError::parse(pos, "expected a declaration"));
        };
        match kw.as_str() {
            "state" => {
                let name = match p.next() {
                    Some((Tok::Ident(n), _)) => n,
                    _ => return Err(SyntaxError::parse(pos, "expected an atom name")),
                };
                p.expect(Tok::Colon, "`:`")?;
                let budget = match p.next() {
                    Some((Tok::Nat(n), q)) => {
                        if n == 0 {
                            return Err(SyntaxError::parse(q, "budgets start at 1"));
                        }
                        Budget::Finite(n as u32)
                    }
                    Some((Tok::Ident(w), _)) if w == "omega" => Budget::Omega,
                    _ => return Err(SyntaxError::parse(pos, "expected a budget or `omega`")),
                };
                if ws.atom(&name).is_some() {
                    return Err(SyntaxError::parse(pos, format!("atom `{name}` declared twice")));
                }
                ws.state_atoms.push(name.clone());
                ws.upsilon.set(&name, budget);
                p.expect(Tok::Semi, "`;`")?;
            }
            "entity" => {
                let name = match p.next() {
                    Some((Tok::Ident(n), _)) => n,
                    _ => return Err(SyntaxError::parse(pos, "expected an atom name")),
                };
                if ws.atom(&name).is_some() {
                    return Err(SyntaxError::parse(pos, format!("atom `{name}` declared twice")));
                }
                ws.entity_atoms.push(name);
                p.expect(Tok::Semi, "`;`")?;
            }
            "const" => {
                let name = match p.next() {
                    Some((Tok::Ident(n), _)) => n,
                    _ => return Err(SyntaxError::parse(pos, "expected a constant name")),
                };
                p.expect(Tok::Colon, "`:`")?;
                let ty = p.parse_type()?;
                let ty = elaborate_type(&ty, &ws, SystemMode::Modal)?;
                if ws.sig.lookup(&name).is_some() {
                    return Err(SyntaxError::parse(
                        pos,
                        format!("constant `{name}` declared twice"),
                    ));
                }
                ws.sig.declare(&name, ty);
                p.expect(Tok::Semi, "`;`")?;
            }
            "free" => {
                let idx = match p.next() {
                    Some((Tok::VarTok(i), _)) => i,
                    _ => return Err(SyntaxError::parse(pos, "expected a variable token")),
                };
                p.expect(Tok::Colon, "`:`")?;
                let ty = p.parse_type()?;
                let ty = elaborate_type(&ty, &ws, SystemMode::Modal)?;
                if let Some(prev) = ws.frees.get(&idx) {
                    if *prev != ty {
                        return Err(SyntaxError::parse(
                            pos,
                            format!("free v{idx} declared at two different types"),
                        ));
                    }
                }
                if !ws.upsilon.admits(&ty, idx) {
                    return Err(SyntaxError::parse(
                        pos,
                        format!("free v{idx} exceeds the budget of {ty}"),
                    ));
                }
                ws.frees.insert(idx, ty);
                p.expect(Tok::Semi, "`;`")?;
            }
            "let" => {
                let name = match p.next() {
                    Some((Tok::Ident(n), _)) => n,
                    _ => return Err(SyntaxError::parse(pos, "expected a name")),
                };
                if ws.lookup_let(&name).is_some() {
                    return Err(SyntaxError::parse(pos, format!("`{name}` bound twice")));
                }
                p.expect(Tok::Equals, "`=`")?;
                let term = p.parse_term()?;
                ws.lets.push((name, term));
                p.expect(Tok::Semi, "`;`")?;
            }
            other => {
                return Err(SyntaxError::parse(
                    pos,
                    format!("unknown declaration keyword `{other}`"),
                ))
            }
        }
    }
    Ok(ws)
}

/// Parses a standalone term against a workspace.
pub fn parse_term(src: &str) -> Result<RawTerm, SyntaxError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0 };
    let t = p.parse_term()?;
    if let Some((tok, pos)) = p.peek() {
        return Err(SyntaxError::parse(*pos, format!("trailing input {tok:?}")));
    }
    Ok(t)
}

pub fn elaborate_type(
    raw: &RawType,
    ws: &Workspace,
    mode: SystemMode,
) -> Result<Type, SyntaxError> {
    match raw {
        RawType::Atom(name, pos) => ws
            .atom(name)
            .ok_or_else(|| SyntaxError::elab(*pos, format!("unknown atom `{name}`"))),
        RawType::Arrow(d, c) => {
            let dom = elaborate_type(d, ws, mode)?;
            let cod = elaborate_type(c, ws, mode)?;
            match mode {
                SystemMode::Full => Ok(Type::arrow_full(dom, cod)),
                _ => Type::arrow(dom, cod.clone()).map_err(|e| {
                    SyntaxError::elab(type_pos(c), e.to_string())
                }),
            }
        }
    }
}

fn type_pos(raw: &RawType) -> Pos {
    match raw {
        RawType::Atom(_, p) => *p,
        RawType::Arrow(d, _) => type_pos(d),
    }
}

fn budget_for(mode: SystemMode, ws: &Workspace) -> Parameter {
    match mode {
        SystemMode::Modal => ws.upsilon.clone(),
        SystemMode::ModalOmega | SystemMode::Full => Parameter::omega(),
    }
}

/// Church typing of a raw tree into a lambda term.
pub fn elaborate_term(
    raw: &RawTerm,
    ws: &Workspace,
    mode: SystemMode,
) -> Result<Term, SyntaxError> {
    let upsilon = budget_for(mode, ws);
    fn go(
        raw: &RawTerm,
        ws: &Workspace,
        mode: SystemMode,
        upsilon: &Parameter,
        env: &mut Vec<Var>,
    ) -> Result<Term, SyntaxError> {
        match raw {
            RawTerm::Var(idx, pos) => {
                // Innermost binder with this token, else a free declaration.
                if let Some(v) = env.iter().rev().find(|v| v.index == *idx) {
                    return Ok(Term::var(v.clone()));
                }
                let ty = ws.frees.get(idx).ok_or_else(|| {
                    SyntaxError::elab(*pos, format!("v{idx} is not bound or declared free"))
                })?;
                let v = Var::new(ty.clone(), *idx);
                check_var(&v, upsilon).map_err(|e| SyntaxError::elab(*pos, e.to_string()))?;
                Ok(Term::var(v))
            }
            RawTerm::Ident(name, pos) => {
                let ty = ws.sig.lookup(name).ok_or_else(|| {
                    SyntaxError::elab(*pos, format!("unknown constant `{name}`"))
                })?;
                Ok(Term::constant(name, ty.clone()))
            }
            RawTerm::Lam(idx, ty, body, pos) => {
                let ty = elaborate_type(ty, ws, mode)?;
                let v = Var::new(ty, *idx);
                check_var(&v, upsilon).map_err(|e| SyntaxError::elab(*pos, e.to_string()))?;
                env.push(v.clone());
                let body = go(body, ws, mode, upsilon, env)?;
                env.pop();
                match mode {
                    SystemMode::Full => Ok(Term::lam_full(v, body)),
                    _ => Term::lam(v, body).map_err(|e| SyntaxError::elab(*pos, e.to_string())),
                }
            }
            RawTerm::App(f, a) => {
                let pos = a.pos();
                let f = go(f, ws, mode, upsilon, env)?;
                let a = go(a, ws, mode, upsilon, env)?;
                Term::app(f, a).map_err(|e| SyntaxError::elab(pos, e.to_string()))
            }
            RawTerm::Comb(kind, dconst, tys, pos) => {
                let spec = comb_spec(kind, dconst, tys, ws, mode)?;
                mk_lambda_combinator(&spec, upsilon, &ws.sig)
                    .map_err(|e| SyntaxError::elab(*pos, e.to_string()))
            }
        }
    }
    go(raw, ws, mode, &upsilon, &mut Vec::new())
}

fn comb_spec(
    kind: &CombKind,
    dconst: &Option<String>,
    tys: &[RawType],
    ws: &Workspace,
    mode: SystemMode,
) -> Result<CombinatorSpec, SyntaxError> {
    let params: Result<Vec<Type>, SyntaxError> =
        tys.iter().map(|t| elaborate_type(t, ws, mode)).collect();
    let params = params?;
    Ok(CombinatorSpec {
        kind: *kind,
        type_params: params,
        dardinal_const: dconst.clone(),
    })
}

/// Typing of a raw tree into a combinatory-logic term; lambdas are a parse
/// error here.
pub fn elaborate_cl_term(
    raw: &RawTerm,
    ws: &Workspace,
    mode: SystemMode,
) -> Result<ClTerm, SyntaxError> {
    let upsilon = budget_for(mode, ws);
    fn go(
        raw: &RawTerm,
        ws: &Workspace,
        mode: SystemMode,
        upsilon: &Parameter,
    ) -> Result<ClTerm, SyntaxError> {
        match raw {
            RawTerm::Var(idx, pos) => {
                let ty = ws.frees.get(idx).ok_or_else(|| {
                    SyntaxError::elab(*pos, format!("v{idx} is not declared free"))
                })?;
                let v = Var::new(ty.clone(), *idx);
                check_var(&v, upsilon).map_err(|e| SyntaxError::elab(*pos, e.to_string()))?;
                Ok(ClTerm::var(v))
            }
            RawTerm::Ident(name, pos) => {
                let ty = ws.sig.lookup(name).ok_or_else(|| {
                    SyntaxError::elab(*pos, format!("unknown constant `{name}`"))
                })?;
                Ok(ClTerm::constant(name, ty.clone()))
            }
            RawTerm::Lam(_, _, _, pos) => Err(SyntaxError::elab(
                *pos,
                "lambda abstraction is not a combinatory-logic term; use `bracket`",
            )),
            RawTerm::App(f, a) => {
                let pos = a.pos();
                let f = go(f, ws, mode, upsilon)?;
                let a = go(a, ws, mode, upsilon)?;
                ClTerm::app(f, a).map_err(|e| SyntaxError::elab(pos, e.to_string()))
            }
            RawTerm::Comb(kind, dconst, tys, pos) => {
                let spec = comb_spec(kind, dconst, tys, ws, mode)?;
                ClTerm::comb(spec, upsilon, &ws.sig)
                    .map_err(|e| SyntaxError::elab(*pos, e.to_string()))
            }
        }
    }
    go(raw, ws, mode, &upsilon)
}

/// Renders a lambda term in the surface syntax (the `Display` instance
/// already matches the grammar).
pub fn pretty_term(term: &Term) -> String {
    term.to_string()
}

pub fn pretty_cl_term(term: &ClTerm) -> String {
    term.to_string()
}

// ---------------------------------------------------------------------
// Frame files.

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ArrowCarrierFile {
    Standard(String),
    Tables(Vec<Vec<u64>>),
}

#[derive(Debug, Deserialize)]
struct ConstEntry {
    #[serde(rename = "type")]
    ty: String,
    value: u64,
}

#[derive(Debug, Deserialize)]
struct FrameFile {
    atoms: BTreeMap<String, u64>,
    #[serde(default)]
    state_atoms: Vec<String>,
    #[serde(default)]
    budgets: BTreeMap<String, serde_json::Value>,
    universe: Vec<String>,
    #[serde(default)]
    arrows: BTreeMap<String, ArrowCarrierFile>,
    #[serde(default)]
    constants: BTreeMap<String, ConstEntry>,
}

/// A loaded frame plus the ambient parameter and signature it declares.
pub struct LoadedFrame {
    pub frame: DecoratedFrame,
    pub upsilon: Parameter,
    pub sig: Signature,
    pub workspace: Workspace,
}

/// Loads a frame description from JSON. Atom statehood comes from
/// `state_atoms`; budgets default to omega; constants carry their types.
pub fn load_frame(json: &str) -> Result<LoadedFrame, String> {
    let file: FrameFile = serde_json::from_str(json).map_err(|e| e.to_string())?;
    let mut ws = Workspace::default();
    for (name, _) in &file.atoms {
        if file.state_atoms.contains(name) {
            ws.state_atoms.push(name.clone());
        } else {
            ws.entity_atoms.push(name.clone());
        }
    }
    for (name, v) in &file.budgets {
        if !file.state_atoms.contains(name) {
            return Err(format!("budget given for non-state atom `{name}`"));
        }
        let budget = match v {
            serde_json::Value::Number(n) => {
                let n = n.as_u64().ok_or("budgets are positive integers")?;
                if n == 0 {
                    return Err("budgets start at 1".into());
                }
                Budget::Finite(n as u32)
            }
            serde_json::Value::String(s) if s == "omega" => Budget::Omega,
            _ => return Err(format!("bad budget for `{name}`")),
        };
        ws.upsilon.set(name, budget);
    }
    let parse_ty = |src: &str, ws: &Workspace| -> Result<Type, String> {
        let toks = lex(src).map_err(|e| e.to_string())?;
        let mut p = Parser { toks, at: 0 };
        let raw = p.parse_type().map_err(|e| e.to_string())?;
        elaborate_type(&raw, ws, SystemMode::Modal).map_err(|e| e.to_string())
    };
    let mut seed: Vec<Type> = Vec::new();
    for src in &file.universe {
        seed.push(parse_ty(src, &ws)?);
    }
    for entry in file.constants.values() {
        seed.push(parse_ty(&entry.ty, &ws)?);
    }
    let universe = TypeUniverse::closure(seed);
    let atom_sizes: BTreeMap<Type, u128> = file
        .atoms
        .iter()
        .map(|(name, size)| {
            let ty = ws.atom(name).expect("declared above");
            (ty, *size as u128)
        })
        .collect();
    for atom in universe.atoms() {
        if !atom_sizes.contains_key(atom) {
            return Err(format!("no size given for atom {atom}"));
        }
    }
    let mut frame = DecoratedFrame::standard(universe, &atom_sizes).map_err(|e| e.to_string())?;
    for (src, carrier) in &file.arrows {
        let ty = parse_ty(src, &ws)?;
        match carrier {
            ArrowCarrierFile::Standard(s) if s == "standard" => {}
            ArrowCarrierFile::Standard(s) => {
                return Err(format!("unknown carrier description `{s}`"))
            }
            ArrowCarrierFile::Tables(tables) => {
                let tables: Vec<Vec<Elem>> = tables
                    .iter()
                    .map(|t| t.iter().map(|&e| e as Elem).collect())
                    .collect();
                frame.set_explicit(&ty, tables).map_err(|e| e.to_string())?;
            }
        }
    }
    for (name, entry) in &file.constants {
        let ty = parse_ty(&entry.ty, &ws)?;
        ws.sig.declare(name, ty.clone());
        frame.declare_constant(name, ty, entry.value as Elem).map_err(|e| e.to_string())?;
    }
    frame.validate_nonempty().map_err(|e| e.to_string())?;
    let upsilon = ws.upsilon.clone();
    let sig = ws.sig.clone();
    Ok(LoadedFrame { frame, upsilon, sig, workspace: ws })
}
