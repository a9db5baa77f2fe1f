//! Flattened `f64` evaluators for hot numeric loops (transport, geodesics).

use num_traits::ToPrimitive;

use super::poly::Poly;
use super::{Expr, Node};

type Terms = Vec<(f64, Vec<(usize, i32)>)>;

#[derive(Clone, Debug)]
enum CNode {
    Const(f64),
    Poly(Terms),
    Ratio(Terms, Terms),
    Sum(Vec<CNode>),
    Product(Vec<CNode>),
    Quotient(Box<CNode>, Box<CNode>),
    Pow(Box<CNode>, i32),
    Exp(Box<CNode>),
    Log(Box<CNode>),
}

fn terms(p: &Poly) -> Terms {
    p.terms()
        .map(|(m, c)| (c.to_f64().unwrap_or(f64::NAN), m.factors().map(|(v, e)| (v, e as i32)).collect()))
        .collect()
}

fn eval_terms(t: &Terms, x: &[f64]) -> f64 {
    t.iter().map(|(c, m)| m.iter().fold(*c, |acc, &(v, e)| acc * x[v].powi(e))).sum()
}

/// An expression compiled for fast floating-point evaluation. Evaluation
/// returns NaN or infinities instead of errors; callers check finiteness.
#[derive(Clone, Debug)]
pub struct CompiledExpr {
    root: CNode,
    dim: usize,
}

impl CompiledExpr {
    pub fn new(e: &Expr) -> Self {
        Self { root: compile(e), dim: e.max_coord().map_or(0, |v| v + 1) }
    }

    /// Minimum point length accepted by [`CompiledExpr::eval`].
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Panics if `x` is shorter than [`CompiledExpr::dim`].
    pub fn eval(&self, x: &[f64]) -> f64 {
        eval(&self.root, x)
    }
}

fn compile(e: &Expr) -> CNode {
    if let Some(r) = e.as_ratfunc() {
        if let Some(c) = r.as_constant() {
            return CNode::Const(c.to_f64().unwrap_or(f64::NAN));
        }
        if r.is_polynomial() {
            return CNode::Poly(terms(r.numerator()));
        }
        return CNode::Ratio(terms(r.numerator()), terms(r.denominator()));
    }
    match e.node() {
        Node::Const(_) | Node::Coord(_) => unreachable!("leaves are rational"),
        Node::Sum(c) => CNode::Sum(c.iter().map(compile).collect()),
        Node::Product(c) => CNode::Product(c.iter().map(compile).collect()),
        Node::Quotient(a, b) => CNode::Quotient(Box::new(compile(a)), Box::new(compile(b))),
        Node::Pow(a, n) => CNode::Pow(Box::new(compile(a)), *n),
        Node::Exp(a) => CNode::Exp(Box::new(compile(a))),
        Node::Log(a) => CNode::Log(Box::new(compile(a))),
    }
}

fn eval(n: &CNode, x: &[f64]) -> f64 {
    match n {
        CNode::Const(c) => *c,
        CNode::Poly(t) => eval_terms(t, x),
        CNode::Ratio(a, b) => eval_terms(a, x) / eval_terms(b, x),
        CNode::Sum(c) => c.iter().map(|t| eval(t, x)).sum(),
        CNode::Product(c) => c.iter().map(|t| eval(t, x)).product(),
        CNode::Quotient(a, b) => eval(a, x) / eval(b, x),
        CNode::Pow(a, k) => eval(a, x).powi(*k),
        CNode::Exp(a) => eval(a, x).exp(),
        CNode::Log(a) => eval(a, x).ln(),
    }
}
