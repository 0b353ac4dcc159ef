//! First-order formulas and their recursive-descent parser.
//!
//! ```text
//! formula := quant | impl
//! quant   := ("exists" | "forall") ident "." formula
//! impl    := disj ["->" impl]
//! disj    := conj {"|" conj}
//! conj    := unit {"&" unit}
//! unit    := "!" unit | "(" formula ")" | quant | atom
//! atom    := term ("=" | "!=") term | ident "(" term {"," term} ")"
//! term    := ident | ident "(" term {"," term} ")" | integer
//! ```
//!
//! A quantifier in unit position extends as far right as possible.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    /// A variable, a constant symbol or a universe literal; resolved against
    /// the structure at evaluation time.
    Name(String),
    App(String, Vec<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Eq(Term, Term),
    Rel(String, Vec<Term>),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Term {
    fn collect_names(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Name(n) if !bound.contains(n) => {
                out.insert(n.clone());
            }
            Term::Name(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_names(bound, out)),
        }
    }
}

impl Formula {
    /// Names occurring free in term position. Some of these may denote
    /// constants or universe literals rather than variables.
    pub fn free_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut Vec::new(), &mut out);
        out
    }

    fn collect_names(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Eq(a, b) => {
                a.collect_names(bound, out);
                b.collect_names(bound, out);
            }
            Formula::Rel(_, args) => args.iter().for_each(|a| a.collect_names(bound, out)),
            Formula::Not(f) => f.collect_names(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_names(bound, out)),
            Formula::Implies(a, b) => {
                a.collect_names(bound, out);
                b.collect_names(bound, out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v.clone());
                f.collect_names(bound, out);
                bound.pop();
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Name(n) => f.write_str(n),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Formula {
    /// Fully parenthesised; re-parses to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, fs: &[Formula], op: &str| {
            f.write_str("(")?;
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{g}")?;
            }
            f.write_str(")")
        };
        match self {
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Not(g) => match g.as_ref() {
                Formula::Eq(a, b) => write!(f, "{a} != {b}"),
                g => write!(f, "!({g})"),
            },
            Formula::Rel(name, args) => write!(f, "{}", Term::App(name.clone(), args.clone())),
            Formula::And(fs) => join(f, fs, "&"),
            Formula::Or(fs) => join(f, fs, "|"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Exists(v, g) => write!(f, "(exists {v}. {g})"),
            Formula::Forall(v, g) => write!(f, "(forall {v}. {g})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Not,
    Neq,
    Eq,
    And,
    Or,
    Arrow,
    LParen,
    RParen,
    Comma,
    Dot,
    End,
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::FormulaSyntax {
        position,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'=' => Tok::Eq,
            b'!' if bytes.get(i + 1) == Some(&b'=') => {
                i += 1;
                Tok::Neq
            }
            b'!' => Tok::Not,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            c if c.is_ascii_digit() => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                Tok::Int(text[start..=i].to_string())
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                let ch = text[i..].chars().next().unwrap();
                return Err(syntax(i, format!("unexpected character {ch:?}")));
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected {what}")))
        }
    }

    fn quantifier(&self) -> Option<bool> {
        match self.peek() {
            Tok::Ident(s) if s == "exists" => Some(true),
            Tok::Ident(s) if s == "forall" => Some(false),
            _ => None,
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        if self.quantifier().is_some() {
            self.quant()
        } else {
            self.implication()
        }
    }

    fn quant(&mut self) -> Result<Formula> {
        let exists = self.quantifier().unwrap();
        self.bump();
        let var = match self.bump() {
            Tok::Ident(v) if v != "exists" && v != "forall" => v,
            _ => return Err(syntax(self.toks[self.at.saturating_sub(1)].0, "expected a variable")),
        };
        self.expect(Tok::Dot, "'.' after the quantified variable")?;
        let body = Box::new(self.formula()?);
        Ok(if exists {
            Formula::Exists(var, body)
        } else {
            Formula::Forall(var, body)
        })
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.conjunction()?];
        while *self.peek() == Tok::Or {
            self.bump();
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::Or(parts) })
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.unit()?];
        while *self.peek() == Tok::And {
            self.bump();
            parts.push(self.unit()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::And(parts) })
    }

    fn unit(&mut self) -> Result<Formula> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::Not(Box::new(self.unit()?)))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            _ if self.quantifier().is_some() => self.quant(),
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        let start = self.pos();
        let lhs = self.term()?;
        match self.peek() {
            Tok::Eq => {
                self.bump();
                Ok(Formula::Eq(lhs, self.term()?))
            }
            Tok::Neq => {
                self.bump();
                Ok(Formula::Not(Box::new(Formula::Eq(lhs, self.term()?))))
            }
            _ => match lhs {
                Term::App(name, args) => Ok(Formula::Rel(name, args)),
                Term::Name(_) => Err(syntax(
                    self.pos().max(start),
                    "expected '=', '!=' or a relation application",
                )),
            },
        }
    }

    fn term(&mut self) -> Result<Term> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => Ok(Term::Name(n)),
            Tok::Ident(name) if name == "exists" || name == "forall" => {
                Err(syntax(pos, "quantifier keyword used as a term"))
            }
            Tok::Ident(name) => {
                if *self.peek() != Tok::LParen {
                    return Ok(Term::Name(name));
                }
                self.bump();
                let mut args = vec![self.term()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.term()?);
                }
                self.expect(Tok::RParen, "')' or ','")?;
                Ok(Term::App(name, args))
            }
            Tok::End => Err(syntax(pos, "unexpected end of input")),
            _ => Err(syntax(pos, "expected a term")),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.pos(), "unexpected trailing input"));
    }
    Ok(f)
}
