//! Sparse multivariate polynomials with rational coefficients.
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], so the representation is
//! canonical: two polynomials are equal as functions iff their maps are equal.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use smallvec::SmallVec;

/// A power product `x_{v1}^{e1} * x_{v2}^{e2} * ...` with variables sorted
/// ascending and every exponent positive.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    factors: SmallVec<[(u32, u32); 4]>,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(index: usize) -> Self {
        Self::var_pow(index, 1)
    }

    pub fn var_pow(index: usize, exp: u32) -> Self {
        let mut factors = SmallVec::new();
        if exp > 0 {
            factors.push((index as u32, exp));
        }
        Self { factors }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.factors.iter().find(|&&(v, _)| v as usize == index).map_or(0, |&(_, e)| e)
    }

    pub fn factors(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.factors.iter().map(|&(v, e)| (v as usize, e))
    }

    pub fn max_var(&self) -> Option<usize> {
        self.factors.last().map(|&(v, _)| v as usize)
    }

    fn merge_with(&self, other: &Self, op: impl Fn(u32, u32) -> u32) -> Self {
        let mut out = SmallVec::new();
        let (mut a, mut b) = (self.factors.iter().peekable(), other.factors.iter().peekable());
        loop {
            let (v, e) = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(&&(va, ea)), None) => {
                    a.next();
                    (va, op(ea, 0))
                }
                (None, Some(&&(vb, eb))) => {
                    b.next();
                    (vb, op(0, eb))
                }
                (Some(&&(va, ea)), Some(&&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => {
                        a.next();
                        (va, op(ea, 0))
                    }
                    Ordering::Greater => {
                        b.next();
                        (vb, op(0, eb))
                    }
                    Ordering::Equal => {
                        a.next();
                        b.next();
                        (va, op(ea, eb))
                    }
                },
            };
            if e > 0 {
                out.push((v, e));
            }
        }
        Self { factors: out }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.merge_with(other, |x, y| x + y)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        self.merge_with(other, u32::min)
    }

    pub fn lcm(&self, other: &Self) -> Self {
        self.merge_with(other, u32::max)
    }

    /// Exact quotient; `None` when `other` does not divide `self`.
    pub fn div(&self, other: &Self) -> Option<Self> {
        if other.factors().any(|(v, e)| self.exponent(v) < e) {
            return None;
        }
        Some(self.merge_with(other, |x, y| x - y))
    }

    /// `d/dx_index` of the monomial as `(multiplier, monomial)`.
    pub fn derivative(&self, index: usize) -> Option<(u32, Self)> {
        let e = self.exponent(index);
        if e == 0 {
            return None;
        }
        Some((e, self.div(&Self::var(index)).expect("exponent checked")))
    }
}

// Graded order: total degree first, then lexicographic on the factor list.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.factors.cmp(&self.factors))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors()
            .map(|(v, e)| if e == 1 { format!("x{}", v + 1) } else { format!("x{}^{}", v + 1, e) })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Multivariate polynomial over the rationals in canonical sparse form.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn var(index: usize) -> Self {
        Self::term(BigRational::one(), Monomial::var(index))
    }

    pub fn term(c: BigRational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// The constant value when the polynomial has no variable terms.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn single_term(&self) -> Option<(&Monomial, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.keys().filter_map(Monomial::max_var).max()
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (mut out, rhs) = if self.len() >= other.len() { (self.clone(), other) } else { (other.clone(), self) };
        for (m, c) in rhs.terms() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul_term(&self, k: &BigRational, mono: &Monomial) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, c)| (m.mul(mono), c * k)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        let mut out = Self::zero();
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..exp {
            out = out.mul(self);
        }
        out
    }

    /// Divide every term by `mono`; the caller guarantees divisibility.
    pub fn div_monomial(&self, mono: &Monomial) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.div(mono).expect("monomial divides every term"), c.clone()))
                .collect(),
        }
    }

    /// Greatest monomial dividing every term (`1` for the zero polynomial).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for m in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn derivative(&self, index: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in self.terms() {
            if let Some((k, dm)) = m.derivative(index) {
                out.add_term(dm, c * BigRational::from_integer(BigInt::from(k)));
            }
        }
        out
    }

    /// Exact value at `point`; `None` if a variable index is out of range.
    pub fn eval_exact(&self, point: &[BigRational]) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for (m, c) in self.terms() {
            let mut t = c.clone();
            for (v, e) in m.factors() {
                let x = point.get(v)?;
                t *= num_traits::pow(x.clone(), e as usize);
            }
            acc += t;
        }
        Some(acc)
    }

    pub fn eval_f64(&self, point: &[f64]) -> Option<f64> {
        let mut acc = 0.0;
        for (m, c) in self.terms() {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (v, e) in m.factors() {
                t *= point.get(v)?.powi(e as i32);
            }
            acc += t;
        }
        Some(acc)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().rev().map(|(m, c)| format!("{c}*{m:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
