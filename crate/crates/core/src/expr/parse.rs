//! Recursive-descent parser for the scalar expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := unary (('*'|'/') unary)*
//! unary  := '-' unary | factor
//! factor := base ('^' integer)?
//! base   := integer | ident | '(' expr ')' | ('exp'|'log') '(' expr ')'
//! ```
//!
//! Rational literals `p/q` parse as a division of integers. Decimal literals
//! are rejected. Leading unary minus is accepted.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Expr, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'.' || bytes[i] == b'e' || bytes[i] == b'E') {
                return Err(Error::Syntax { pos: i, message: "decimal literals are not allowed".into() });
            }
            let n: BigInt = text[start..i].parse().expect("digit run");
            out.push((start, Tok::Int(n)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else if c == '.' {
            return Err(Error::Syntax { pos: i, message: "decimal literals are not allowed".into() });
        } else {
            return Err(Error::Syntax { pos: i, message: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    coords: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, op: char) -> Result<()> {
        if self.eat_op(op) {
            Ok(())
        } else {
            Err(Error::Syntax { pos: self.pos(), message: format!("expected `{op}`") })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat_op('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat_op('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat_op('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.peek() == Some(&Tok::Op('/')) {
                let pos = self.pos();
                self.at += 1;
                let rhs = self.unary()?;
                acc = acc.checked_div(&rhs).map_err(|_| Error::Syntax { pos, message: "division by zero".into() })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op('-') {
            return Ok(self.unary()?.neg());
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if !self.eat_op('^') {
            return Ok(base);
        }
        let pos = self.pos();
        let negative = self.eat_op('-');
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                let n: i32 = n.try_into().map_err(|_| Error::Syntax { pos, message: "exponent too large".into() })?;
                let n = if negative { -n } else { n };
                base.powi(n).map_err(|_| Error::Syntax { pos, message: "negative power of zero".into() })
            }
            _ => Err(Error::Syntax { pos, message: "expected an integer exponent".into() }),
        }
    }

    fn base(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                Ok(Expr::constant(Rational::from_integer(n)))
            }
            Some(Tok::Op('(')) => {
                self.at += 1;
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                if name == "exp" || name == "log" {
                    self.expect_op('(')?;
                    let arg = self.expr()?;
                    self.expect_op(')')?;
                    return Ok(if name == "exp" { Expr::exp(&arg) } else { Expr::log(&arg) });
                }
                match self.coords.iter().position(|c| *c == name) {
                    Some(i) => Ok(Expr::coord(i)),
                    None => Err(Error::UnknownIdentifier { name, pos }),
                }
            }
            Some(Tok::Op(c)) => Err(Error::Syntax { pos, message: format!("unexpected `{c}`") }),
            None => Err(Error::Syntax { pos, message: "unexpected end of input".into() }),
        }
    }
}

/// Parse `text` as a scalar expression over the named coordinates.
pub fn parse_scalar<S: AsRef<str>>(text: &str, coords: &[S]) -> Result<Expr> {
    let coords: Vec<String> = coords.iter().map(|s| s.as_ref().to_string()).collect();
    let toks = tokenize(text)?;
    let mut p = Parser { toks, at: 0, end: text.len(), coords: &coords };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return Err(Error::Syntax { pos: p.pos(), message: "trailing input".into() });
    }
    Ok(e)
}

/// Parse a rational literal `p`, `-p`, `p/q` or `-p/q`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = |pos| Error::Syntax { pos, message: format!("`{t}` is not a rational literal p/q") };
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (body, "1"),
    };
    let all_digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(num) {
        return Err(bad(0));
    }
    if !all_digits(den) {
        return Err(bad(t.len() - den.len()));
    }
    let n: BigInt = num.parse().map_err(|_| bad(0))?;
    let d: BigInt = den.parse().map_err(|_| bad(0))?;
    if d.is_zero() {
        return Err(Error::Syntax { pos: t.len() - den.len(), message: "zero denominator".into() });
    }
    let r = Rational::new(n, d);
    Ok(if neg { -r } else { r })
}
