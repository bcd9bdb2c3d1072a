//! Untyped λ-terms and their denotation in D∞ at a fixed cutoff level.

use std::collections::HashMap;
use std::fmt;

use crate::bilimit::CompactElement;
use crate::dinfty::{DInfinity, FinFun};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Lam(String, Box<Term>),
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    pub fn lam(name: &str, body: Term) -> Self {
        Term::Lam(name.to_string(), Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Self {
        Term::App(Box::new(f), Box::new(a))
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Lam(_, body) => 1 + body.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn free_vars(&self) -> Vec<String> {
        fn go(t: &Term, bound: &mut Vec<String>, out: &mut Vec<String>) {
            match t {
                Term::Var(x) => {
                    if !bound.contains(x) && !out.contains(x) {
                        out.push(x.clone());
                    }
                }
                Term::Lam(x, body) => {
                    bound.push(x.clone());
                    go(body, bound, out);
                    bound.pop();
                }
                Term::App(f, a) => {
                    go(f, bound, out);
                    go(a, bound, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::Lam(x, body) => write!(f, "\\{x}.{body}"),
            Term::App(fun, arg) => {
                match fun.as_ref() {
                    Term::Lam(..) => write!(f, "({fun})")?,
                    _ => write!(f, "{fun}")?,
                }
                match arg.as_ref() {
                    Term::Var(_) => write!(f, " {arg}"),
                    _ => write!(f, " ({arg})"),
                }
            }
        }
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    src: &'a str,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            chars: src.char_indices().collect(),
            pos: 0,
            src,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn error(&self, expected: &str) -> Error {
        Error::Syntax {
            position: self.pos,
            expected: expected.to_string(),
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("`{want}`")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && is_ident_char(self.chars[self.pos].1) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("identifier"));
        }
        let from = self.chars[start].0;
        let to = self.chars.get(self.pos).map_or(self.src.len(), |&(i, _)| i);
        Ok(self.src[from..to].to_string())
    }

    fn term(&mut self) -> Result<Term> {
        let mut head: Option<Term> = None;
        loop {
            let next = match self.peek() {
                Some('\\') | Some('λ') => {
                    self.pos += 1;
                    let name = self.ident()?;
                    self.expect('.')?;
                    let body = self.term()?;
                    // the body extends as far right as possible
                    let lam = Term::lam(&name, body);
                    return Ok(match head {
                        Some(h) => Term::app(h, lam),
                        None => lam,
                    });
                }
                Some('(') => {
                    self.pos += 1;
                    let inner = self.term()?;
                    self.expect(')')?;
                    inner
                }
                Some(c) if is_ident_char(c) => Term::Var(self.ident()?),
                _ => break,
            };
            head = Some(match head {
                Some(h) => Term::app(h, next),
                None => next,
            });
        }
        head.ok_or_else(|| self.error("term"))
    }
}

/// Parses `term ::= λx.term | term term | x | (term)`, with `\` accepted for λ.
pub fn parse_term(src: &str) -> Result<Term> {
    let mut p = Parser::new(src);
    let t = p.term()?;
    if p.peek().is_some() {
        return Err(p.error("end of input"));
    }
    Ok(t)
}

pub type Env = HashMap<String, CompactElement>;

/// `⟦term⟧` with every abstraction tabulated over `D_cutoff`:
/// `⟦x⟧ = env(x)`, `⟦M N⟧ = Φ(⟦M⟧)(⟦N⟧)`, and `⟦λx.M⟧ = Ψ` of the element of
/// `D_{cutoff+1}` sending `d` to `π_cutoff(⟦M⟧[x ↦ ε_cutoff(d)])`.
pub fn denote(model: &DInfinity, term: &Term, env: &Env, cutoff: usize) -> Result<CompactElement> {
    if cutoff + 1 > model.depth() {
        return Err(Error::LevelOutOfRange {
            level: cutoff + 1,
            depth: model.depth(),
        });
    }
    let mut env = env.clone();
    denote_in(model, term, &mut env, cutoff)
}

fn denote_in(model: &DInfinity, term: &Term, env: &mut Env, cutoff: usize) -> Result<CompactElement> {
    match term {
        Term::Var(x) => env.get(x).copied().ok_or_else(|| Error::UnboundVariable(x.clone())),
        Term::App(f, a) => {
            let fun = denote_in(model, f, env, cutoff)?;
            let arg = denote_in(model, a, env, cutoff)?;
            model.phi_apply(model.phi(fun)?, arg)
        }
        Term::Lam(x, body) => {
            let level = model.tower().level(cutoff).clone();
            let saved = env.get(x).copied();
            let mut table = Vec::with_capacity(level.size());
            for d in level.elements() {
                env.insert(x.clone(), model.embed(cutoff, d)?);
                let value = denote_in(model, body, env, cutoff);
                let value = match value {
                    Ok(v) => model.project(v, cutoff)?,
                    Err(e) => {
                        restore(env, x, saved);
                        return Err(e);
                    }
                };
                table.push(value);
            }
            restore(env, x, saved);
            let space = model.space(cutoff + 1);
            let elem = match space.index_of(&table) {
                Some(elem) => elem,
                None => {
                    let (i, j) = level
                        .elements()
                        .flat_map(|i| level.elements().map(move |j| (i, j)))
                        .find(|&(i, j)| level.leq(i, j) && !level.leq(table[i], table[j]))
                        .unwrap_or((0, 0));
                    return Err(Error::NotMonotone(i, j));
                }
            };
            model.psi(FinFun::new(cutoff + 1, elem))
        }
    }
}

fn restore(env: &mut Env, x: &str, saved: Option<CompactElement>) {
    match saved {
        Some(v) => env.insert(x.to_string(), v),
        None => env.remove(x),
    };
}
