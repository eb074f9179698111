//! Concrete syntax for terms, constraints and queries.
//!
//! ```text
//! query      := 'exists' ident (',' ident)* '.' query | qconj
//! qconj      := qunary ('&' qunary)*
//! qunary     := '!' qunary | '(' query ')' | constraint
//! constraint := conj ('|' conj)*
//! conj       := unary ('&' unary)*
//! unary      := '!' unary | 'true' | 'false' | comparison | '(' constraint ')'
//! comparison := term (cmp term)+          -- chains expand to conjunctions
//! cmp        := '<' | '<=' | '=' | '>=' | '>' | '!='
//! term       := product (('+' | '-') product)*
//! product    := factor (('*' | '/') factor)*
//! factor     := '-' factor | number | ident | '(' term ')'
//! ```

use thiserror::Error;

use super::expr::{name, Constraint, Name, Query, Term};
use crate::rational::{parse_decimal, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown operator '{op}' at {pos}")]
    UnknownOperator { pos: usize, op: char },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
    Bang,
    Amp,
    Pipe,
    Comma,
    Dot,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let value = parse_decimal(text).ok_or_else(|| ParseError::Syntax {
                pos: start,
                msg: format!("malformed number '{}'", &src[start..i]),
            })?;
            out.push((Tok::Num(value), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
            continue;
        }
        let next = bytes.get(i + 1).copied().map(|b| b as char);
        let (tok, len) = match (c, next) {
            ('<', Some('=')) => (Tok::Le, 2),
            ('>', Some('=')) => (Tok::Ge, 2),
            ('=', Some('=')) => (Tok::Eq, 2),
            ('!', Some('=')) => (Tok::Ne, 2),
            ('&', Some('&')) => (Tok::Amp, 2),
            ('|', Some('|')) => (Tok::Pipe, 2),
            ('<', _) => (Tok::Lt, 1),
            ('>', _) => (Tok::Gt, 1),
            ('=', _) => (Tok::Eq, 1),
            ('!', _) => (Tok::Bang, 1),
            ('&', _) => (Tok::Amp, 1),
            ('|', _) => (Tok::Pipe, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            (',', _) => (Tok::Comma, 1),
            ('.', _) => (Tok::Dot, 1),
            _ => {
                let op = src[i..].chars().next().unwrap_or(c);
                return Err(ParseError::UnknownOperator { pos: i, op });
            }
        };
        out.push((tok, start));
        i += len;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

const KEYWORDS: [&str; 3] = ["true", "false", "exists"];

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.offset(), msg: msg.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::End => Ok(()),
            t => self.err(format!("unexpected {}", describe(t))),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    // ---- terms ----

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.product()?;
        loop {
            if self.eat(&Tok::Plus) {
                lhs = lhs + self.product()?;
            } else if self.eat(&Tok::Minus) {
                lhs = lhs - self.product()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(&Tok::Star) {
                lhs = lhs * self.factor()?;
            } else if self.eat(&Tok::Slash) {
                lhs = lhs / self.factor()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                Ok(-self.factor()?)
            }
            Tok::Num(r) => {
                self.bump();
                Ok(Term::Const(r))
            }
            Tok::Ident(s) => {
                if KEYWORDS.contains(&s.as_str()) {
                    return self.err(format!("keyword '{s}' is not a term"));
                }
                self.bump();
                Ok(Term::Var(name(&s)))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            t => self.err(format!("expected a term, found {}", describe(&t))),
        }
    }

    // ---- constraints ----

    fn constraint(&mut self) -> Result<Constraint, ParseError> {
        let mut lhs = self.conj()?;
        while self.eat(&Tok::Pipe) {
            lhs = lhs.or(self.conj()?);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Constraint, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::Amp) {
            lhs = lhs.and(self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Constraint, ParseError> {
        if self.eat(&Tok::Bang) {
            return Ok(self.unary()?.negate());
        }
        if self.is_keyword("true") {
            self.bump();
            return Ok(Constraint::True);
        }
        if self.is_keyword("false") {
            self.bump();
            return Ok(Constraint::falsum());
        }
        // Either a comparison (possibly starting with a parenthesised term) or a
        // parenthesised constraint; try the comparison first and backtrack.
        let save = self.pos;
        match self.comparison() {
            Ok(c) => Ok(c),
            Err(first) => {
                self.pos = save;
                if self.eat(&Tok::LParen) {
                    let c = self.constraint()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(c)
                } else {
                    Err(first)
                }
            }
        }
    }

    fn comparison(&mut self) -> Result<Constraint, ParseError> {
        let mut lhs = self.term()?;
        let mut parts = Vec::new();
        while let Some(op) = cmp_op(self.peek()) {
            self.bump();
            let rhs = self.term()?;
            parts.push(op(lhs, rhs.clone()));
            lhs = rhs;
        }
        if parts.is_empty() {
            return self.err(format!("expected a comparison operator, found {}", describe(self.peek())));
        }
        Ok(Constraint::all(parts))
    }

    // ---- queries ----

    fn query(&mut self) -> Result<Query, ParseError> {
        if self.is_keyword("exists") {
            self.bump();
            let mut vars = vec![self.ident()?];
            while self.eat(&Tok::Comma) {
                vars.push(self.ident()?);
            }
            if !self.eat(&Tok::Dot) {
                self.expect(Tok::Comma, "'.' after bound variables")?;
            }
            let body = self.query()?;
            return Ok(vars.into_iter().rev().fold(body, |q, v| Query::Exists(v, Box::new(q))));
        }
        let mut lhs = self.qunary()?;
        while self.eat(&Tok::Amp) {
            lhs = Query::And(Box::new(lhs), Box::new(self.qunary()?));
        }
        Ok(lhs)
    }

    fn qunary(&mut self) -> Result<Query, ParseError> {
        let save = self.pos;
        if self.eat(&Tok::Bang) {
            return Ok(Query::Not(Box::new(self.qunary()?)));
        }
        if self.is_keyword("exists") {
            return self.query();
        }
        if self.eat(&Tok::LParen) {
            if let Ok(q) = self.query() {
                if self.eat(&Tok::RParen) && matches!(self.peek(), Tok::Amp | Tok::RParen | Tok::End) {
                    return Ok(q);
                }
            }
            self.pos = save;
        }
        Ok(Query::Base(self.constraint()?))
    }

    fn ident(&mut self) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(name(&s))
            }
            t => self.err(format!("expected an identifier, found {}", describe(&t))),
        }
    }
}

type CmpCtor = fn(Term, Term) -> Constraint;

fn cmp_op(t: &Tok) -> Option<CmpCtor> {
    Some(match t {
        Tok::Lt => Constraint::Lt,
        Tok::Le => Constraint::Leq,
        Tok::Eq => Constraint::Eq,
        Tok::Ge => Constraint::Geq,
        Tok::Gt => Constraint::Gt,
        Tok::Ne => |a, b| Constraint::Eq(a, b).negate(),
        _ => return None,
    })
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(r) => format!("number {r}"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::End => "end of input".into(),
        other => format!("{other:?}"),
    }
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.expect_end()?;
    Ok(t)
}

pub fn parse_constraint(src: &str) -> Result<Constraint, ParseError> {
    let mut p = Parser::new(src)?;
    let c = p.constraint()?;
    p.expect_end()?;
    Ok(c)
}

/// Parses a query; quantifier-free parts are collapsed into single `Base` nodes.
pub fn parse_query(src: &str) -> Result<Query, ParseError> {
    let mut p = Parser::new(src)?;
    let q = p.query()?;
    p.expect_end()?;
    Ok(q.collapse())
}
