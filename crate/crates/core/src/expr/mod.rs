//! Exact scalar expressions in chart coordinates.
//!
//! An [`Expr`] is an immutable, cheaply clonable tree. Subtrees without
//! `exp`/`log` nodes are carried as canonical rational functions ([`RatFunc`]),
//! so arithmetic on them is exact and zero-testing reduces to checking a
//! normalized numerator. Transcendental subtrees support differentiation and
//! floating-point evaluation only.

mod compile;
mod parse;
pub mod poly;
pub mod ratfunc;
mod zero;

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
pub use compile::CompiledExpr;
pub use parse::{parse_rational, parse_scalar};
use poly::Poly;
use ratfunc::RatFunc;
pub use zero::{ZeroTest, FLOAT_SAMPLES, FLOAT_THRESHOLD};

pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Format a rational as `p` or `p/q`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Evaluation mode for [`Expr::evaluate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

/// A point in chart coordinates, exact or floating.
#[derive(Clone, Debug, PartialEq)]
pub enum EvalPoint {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

impl EvalPoint {
    pub fn len(&self) -> usize {
        match self {
            Self::Exact(v) => v.len(),
            Self::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            Self::Exact(v) => v.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect(),
            Self::Float(v) => v.clone(),
        }
    }
}

/// Result of an evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Rational),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Self::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Self::Float(x) => *x,
        }
    }
}

/// Tree node of an expression.
#[derive(Clone, Debug)]
pub enum Node {
    Const(Rational),
    Coord(usize),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Quotient(Expr, Expr),
    Pow(Expr, i32),
    Exp(Expr),
    Log(Expr),
}

struct Inner {
    rat: Option<RatFunc>,
    node: OnceLock<Node>,
}

/// Immutable symbolic scalar expression.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

impl Expr {
    fn from_node(node: Node) -> Self {
        let cell = OnceLock::new();
        let _ = cell.set(node);
        Self(Arc::new(Inner { rat: None, node: cell }))
    }

    pub fn from_ratfunc(r: RatFunc) -> Self {
        Self(Arc::new(Inner { rat: Some(r), node: OnceLock::new() }))
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_ratfunc(RatFunc::constant(c))
    }

    pub fn int(n: i64) -> Self {
        Self::constant(integer(n))
    }

    pub fn zero() -> Self {
        Self::from_ratfunc(RatFunc::zero())
    }

    pub fn one() -> Self {
        Self::from_ratfunc(RatFunc::one())
    }

    /// The coordinate function `x^(index+1)`.
    pub fn coord(index: usize) -> Self {
        Self::from_ratfunc(RatFunc::var(index))
    }

    pub fn exp(arg: &Expr) -> Self {
        if arg.is_zero_literal() {
            return Self::one();
        }
        Self::from_node(Node::Exp(arg.clone()))
    }

    /// Natural logarithm; `log(exp(h))` folds to `h`.
    pub fn log(arg: &Expr) -> Self {
        if arg.as_constant().is_some_and(|c| c.is_one()) {
            return Self::zero();
        }
        if !arg.is_rational() {
            if let Node::Exp(h) = arg.node() {
                return h.clone();
            }
        }
        Self::from_node(Node::Log(arg.clone()))
    }

    /// True iff the tree has no exp/log node.
    pub fn is_rational(&self) -> bool {
        self.0.rat.is_some()
    }

    pub fn as_ratfunc(&self) -> Option<&RatFunc> {
        self.0.rat.as_ref()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        self.0.rat.as_ref().and_then(RatFunc::as_constant)
    }

    /// Structurally the zero constant (no simplification attempted).
    pub fn is_zero_literal(&self) -> bool {
        self.0.rat.as_ref().is_some_and(RatFunc::is_zero)
    }

    pub fn is_one_literal(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The tree view. Rational expressions materialize it on first access.
    pub fn node(&self) -> &Node {
        self.0.node.get_or_init(|| {
            let r = self.0.rat.as_ref().expect("transcendental nodes are set at construction");
            node_from_ratfunc(r)
        })
    }

    /// Highest coordinate index appearing in the expression.
    pub fn max_coord(&self) -> Option<usize> {
        if let Some(r) = &self.0.rat {
            return r.max_var();
        }
        match self.node() {
            Node::Const(_) => None,
            Node::Coord(i) => Some(*i),
            Node::Sum(c) | Node::Product(c) => c.iter().filter_map(Expr::max_coord).max(),
            Node::Quotient(a, b) => a.max_coord().max(b.max_coord()),
            Node::Pow(a, _) | Node::Exp(a) | Node::Log(a) => a.max_coord(),
        }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        if let (Some(a), Some(b)) = (&self.0.rat, &other.0.rat) {
            return Self::from_ratfunc(a.add(b));
        }
        if self.is_zero_literal() {
            return other.clone();
        }
        if other.is_zero_literal() {
            return self.clone();
        }
        let mut rat = RatFunc::zero();
        let mut rest = Vec::new();
        for e in [self, other] {
            let children: &[Expr] = match e.node() {
                Node::Sum(c) => c,
                _ => std::slice::from_ref(e),
            };
            for c in children {
                match &c.0.rat {
                    Some(r) => rat = rat.add(r),
                    None => rest.push(c.clone()),
                }
            }
        }
        if !rat.is_zero() {
            rest.insert(0, Self::from_ratfunc(rat));
        }
        if rest.len() == 1 {
            return rest.pop().unwrap();
        }
        Self::from_node(Node::Sum(rest))
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Expr {
        if let Some(r) = &self.0.rat {
            return Self::from_ratfunc(r.neg());
        }
        self.scale(&integer(-1))
    }

    pub fn scale(&self, k: &Rational) -> Expr {
        self.mul(&Self::constant(k.clone()))
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        if let (Some(a), Some(b)) = (&self.0.rat, &other.0.rat) {
            return Self::from_ratfunc(a.mul(b));
        }
        if self.is_zero_literal() || other.is_zero_literal() {
            return Self::zero();
        }
        if self.is_one_literal() {
            return other.clone();
        }
        if other.is_one_literal() {
            return self.clone();
        }
        let mut rat = RatFunc::one();
        let mut rest = Vec::new();
        for e in [self, other] {
            let children: &[Expr] = match e.node() {
                Node::Product(c) => c,
                _ => std::slice::from_ref(e),
            };
            for c in children {
                match &c.0.rat {
                    Some(r) => rat = rat.mul(r),
                    None => rest.push(c.clone()),
                }
            }
        }
        if rat.is_zero() {
            return Self::zero();
        }
        if !rat.as_constant().is_some_and(|c| c.is_one()) {
            rest.insert(0, Self::from_ratfunc(rat));
        }
        if rest.len() == 1 {
            return rest.pop().unwrap();
        }
        Self::from_node(Node::Product(rest))
    }

    /// Quotient; fails only when the divisor is the literal zero.
    pub fn checked_div(&self, other: &Expr) -> Result<Expr> {
        if let Some(b) = &other.0.rat {
            let inv = b.recip().ok_or(Error::DivisionByZero)?;
            return Ok(self.mul(&Self::from_ratfunc(inv)));
        }
        if self.is_zero_literal() {
            return Ok(Self::zero());
        }
        Ok(Self::from_node(Node::Quotient(self.clone(), other.clone())))
    }

    pub fn powi(&self, exp: i32) -> Result<Expr> {
        if let Some(r) = &self.0.rat {
            return r.powi(exp).map(Self::from_ratfunc).ok_or(Error::DivisionByZero);
        }
        Ok(match exp {
            0 => Self::one(),
            1 => self.clone(),
            _ => Self::from_node(Node::Pow(self.clone(), exp)),
        })
    }

    /// Exact partial derivative with respect to coordinate `index`.
    pub fn diff(&self, index: usize) -> Expr {
        if let Some(r) = &self.0.rat {
            return Self::from_ratfunc(r.derivative(index));
        }
        match self.node() {
            Node::Const(_) | Node::Coord(_) => unreachable!("leaves are rational"),
            Node::Sum(c) => c.iter().fold(Self::zero(), |acc, t| acc.add(&t.diff(index))),
            Node::Product(c) => {
                let mut acc = Self::zero();
                for (i, f) in c.iter().enumerate() {
                    let d = f.diff(index);
                    if d.is_zero_literal() {
                        continue;
                    }
                    let term = c.iter().enumerate().filter(|&(j, _)| j != i).fold(d, |p, (_, g)| p.mul(g));
                    acc = acc.add(&term);
                }
                acc
            }
            Node::Quotient(a, b) => {
                let num = a.diff(index).mul(b).sub(&a.mul(&b.diff(index)));
                if num.is_zero_literal() {
                    return Self::zero();
                }
                Self::from_node(Node::Quotient(num, b.mul(b)))
            }
            Node::Pow(a, n) => {
                let da = a.diff(index);
                if da.is_zero_literal() {
                    return Self::zero();
                }
                let lower = a.powi(n - 1).expect("transcendental base");
                lower.scale(&integer(*n as i64)).mul(&da)
            }
            Node::Exp(a) => self.mul(&a.diff(index)),
            Node::Log(a) => {
                let da = a.diff(index);
                da.checked_div(a).expect("transcendental or nonzero divisor")
            }
        }
    }

    pub fn gradient(&self, dim: usize) -> Vec<Expr> {
        (0..dim).map(|i| self.diff(i)).collect()
    }

    /// Evaluate at `p`. Exact mode requires a rational expression and an
    /// exact point; float mode accepts either kind of point.
    pub fn evaluate(&self, p: &EvalPoint, mode: Mode) -> Result<Value> {
        match mode {
            Mode::Exact => {
                let EvalPoint::Exact(x) = p else {
                    return Err(Error::Precondition("exact mode needs a rational point".into()));
                };
                self.eval_exact(x).map(Value::Exact)
            }
            Mode::Float => self.eval_float(&p.to_f64()).map(Value::Float),
        }
    }

    pub fn eval_exact(&self, p: &[Rational]) -> Result<Rational> {
        let r = self.0.rat.as_ref().ok_or(Error::TranscendentalInExactMode)?;
        r.eval_exact(p).map_err(|den_zero| {
            if den_zero {
                Error::DivisionByZero
            } else {
                Error::PointDimension { expected: r.max_var().map_or(0, |v| v + 1), got: p.len() }
            }
        })
    }

    pub fn eval_float(&self, p: &[f64]) -> Result<f64> {
        let v = self.eval_float_raw(p)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite)
        }
    }

    fn eval_float_raw(&self, p: &[f64]) -> Result<f64> {
        if let Some(r) = &self.0.rat {
            let dim_err = || Error::PointDimension { expected: r.max_var().map_or(0, |v| v + 1), got: p.len() };
            let n = r.numerator().eval_f64(p).ok_or_else(dim_err)?;
            if r.is_polynomial() {
                return Ok(n);
            }
            let d = r.denominator().eval_f64(p).ok_or_else(dim_err)?;
            if d == 0.0 {
                return Err(Error::DivisionByZero);
            }
            return Ok(n / d);
        }
        Ok(match self.node() {
            Node::Const(c) => c.to_f64().ok_or(Error::NonFinite)?,
            Node::Coord(i) => *p.get(*i).ok_or(Error::PointDimension { expected: i + 1, got: p.len() })?,
            Node::Sum(c) => {
                let mut s = 0.0;
                for t in c {
                    s += t.eval_float_raw(p)?;
                }
                s
            }
            Node::Product(c) => {
                let mut s = 1.0;
                for t in c {
                    s *= t.eval_float_raw(p)?;
                }
                s
            }
            Node::Quotient(a, b) => {
                let d = b.eval_float_raw(p)?;
                if d == 0.0 {
                    return Err(Error::DivisionByZero);
                }
                a.eval_float_raw(p)? / d
            }
            Node::Pow(a, n) => a.eval_float_raw(p)?.powi(*n),
            Node::Exp(a) => a.eval_float_raw(p)?.exp(),
            Node::Log(a) => {
                let v = a.eval_float_raw(p)?;
                if v <= 0.0 {
                    return Err(Error::NonFinite);
                }
                v.ln()
            }
        })
    }

    /// Render with the given coordinate names (defaults to `x1, x2, ...`).
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> DisplayExpr<'a> {
        DisplayExpr { expr: self, names: Some(names) }
    }
}

fn node_from_ratfunc(r: &RatFunc) -> Node {
    if r.is_polynomial() {
        return node_from_poly(r.numerator());
    }
    Node::Quotient(
        Expr::from_ratfunc(RatFunc::from_poly(r.numerator().clone())),
        Expr::from_ratfunc(RatFunc::from_poly(r.denominator().clone())),
    )
}

fn node_from_poly(p: &Poly) -> Node {
    if let Some(c) = p.as_constant() {
        return Node::Const(c);
    }
    if p.len() > 1 {
        return Node::Sum(
            p.terms()
                .rev()
                .map(|(m, c)| Expr::from_ratfunc(RatFunc::from_poly(Poly::term(c.clone(), m.clone()))))
                .collect(),
        );
    }
    let (m, c) = p.single_term().expect("single nonconstant term");
    let vars: Vec<(usize, u32)> = m.factors().collect();
    if let ([(v, 1)], true) = (vars.as_slice(), c.is_one()) {
        return Node::Coord(*v);
    }
    let mut factors: Vec<Expr> = Vec::new();
    if !c.is_one() {
        factors.push(Expr::constant(c.clone()));
    }
    for (v, e) in vars {
        factors.push(if e == 1 { Expr::coord(v) } else { Expr::from_node(Node::Pow(Expr::coord(v), e as i32)) });
    }
    if factors.len() == 1 {
        return factors.pop().unwrap().node().clone();
    }
    Node::Product(factors)
}

impl Default for Expr {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Self::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(r: Rational) -> Self {
        Self::constant(r)
    }
}

macro_rules! bin_op {
    ($tr:ident, $method:ident, $call:ident) => {
        impl std::ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$call(self, rhs)
            }
        }
        impl std::ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$call(&self, &rhs)
            }
        }
        impl std::ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$call(&self, rhs)
            }
        }
        impl std::ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$call(self, &rhs)
            }
        }
    };
}

bin_op!(Add, add, add);
bin_op!(Sub, sub, sub);
bin_op!(Mul, mul, mul);

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

/// Panics when dividing by the literal zero; use [`Expr::checked_div`] otherwise.
impl std::ops::Div<&Expr> for &Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        self.checked_div(rhs).expect("division by the zero expression")
    }
}

impl std::ops::Div<Expr> for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        &self / &rhs
    }
}

pub struct DisplayExpr<'a> {
    expr: &'a Expr,
    names: Option<&'a [String]>,
}

const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_ATOM: u8 = 4;

impl DisplayExpr<'_> {
    fn name(&self, i: usize) -> String {
        match self.names.and_then(|n| n.get(i)) {
            Some(s) => s.clone(),
            None => format!("x{}", i + 1),
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
        let (prec, text) = self.render(e);
        if prec < min_prec {
            write!(f, "({text})")
        } else {
            write!(f, "{text}")
        }
    }

    fn render(&self, e: &Expr) -> (u8, String) {
        let sub = |x: &Expr, p: u8| -> String {
            let (q, t) = self.render(x);
            if q < p {
                format!("({t})")
            } else {
                t
            }
        };
        match e.node() {
            Node::Const(c) => {
                if c.is_negative() {
                    (PREC_SUM, format!("-{}", format_rational(&c.abs())))
                } else if c.is_integer() {
                    (PREC_ATOM, c.numer().to_string())
                } else {
                    (PREC_PRODUCT, format_rational(c))
                }
            }
            Node::Coord(i) => (PREC_ATOM, self.name(*i)),
            Node::Sum(c) => {
                let mut out = String::new();
                for (k, t) in c.iter().enumerate() {
                    let part = sub(t, PREC_SUM);
                    match (k, part.strip_prefix('-')) {
                        (0, _) => out.push_str(&part),
                        (_, Some(rest)) => out.push_str(&format!(" - {rest}")),
                        (_, None) => out.push_str(&format!(" + {part}")),
                    }
                }
                (PREC_SUM, out)
            }
            Node::Product(c) => {
                let lead = c.first().and_then(Expr::as_constant).filter(|k| k.is_negative());
                let (sign, factors) = match &lead {
                    Some(k) if (-k).is_one() => ("-", &c[1..]),
                    _ => ("", &c[..]),
                };
                let mut parts: Vec<String> = Vec::new();
                for (k, t) in factors.iter().enumerate() {
                    match (k, t.as_constant()) {
                        (0, Some(q)) if q.is_negative() && sign.is_empty() => {
                            parts.push(format!("-{}", format_rational(&q.abs())));
                        }
                        _ => parts.push(sub(t, PREC_PRODUCT + 1)),
                    }
                }
                let text = format!("{sign}{}", parts.join("*"));
                (if text.starts_with('-') { PREC_SUM } else { PREC_PRODUCT }, text)
            }
            Node::Quotient(a, b) => (PREC_PRODUCT, format!("{}/{}", sub(a, PREC_PRODUCT + 1), sub(b, PREC_ATOM))),
            Node::Pow(a, n) => (PREC_ATOM - 1, format!("{}^{}", sub(a, PREC_ATOM), n)),
            Node::Exp(a) => (PREC_ATOM, format!("exp({})", sub(a, 0))),
            Node::Log(a) => (PREC_ATOM, format!("log({})", sub(a, 0))),
        }
    }
}

impl fmt::Display for DisplayExpr<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.expr, 0)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        DisplayExpr { expr: self, names: None }.fmt(f)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}
