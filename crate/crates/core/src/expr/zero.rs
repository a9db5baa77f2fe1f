//! Identically-zero tests.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Expr, Node};
use crate::sample::{random_rational, FLOAT_BOX};

/// Number of float samples used for expressions with exp/log nodes.
pub const FLOAT_SAMPLES: usize = 20;
/// Absolute threshold (scaled by the term magnitude when that exceeds 1).
pub const FLOAT_THRESHOLD: f64 = 1e-9;

const ZERO_TEST_SEED: u64 = 0x5EED_2E50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroTest {
    /// Certified exactly.
    Zero,
    Nonzero,
    /// All float samples fell below the threshold; not a proof.
    NumericZero,
}

impl ZeroTest {
    pub fn is_zero(self) -> bool {
        !matches!(self, Self::Nonzero)
    }
}

impl Expr {
    /// Decide whether the expression vanishes identically.
    ///
    /// Rational expressions are decided by their canonical numerator, and a
    /// zero verdict is confirmed at one random rational point. Expressions
    /// with exp/log are sampled at [`FLOAT_SAMPLES`] points.
    pub fn zero_test(&self) -> ZeroTest {
        let mut rng = ChaCha8Rng::seed_from_u64(ZERO_TEST_SEED);
        self.zero_test_with(&mut rng)
    }

    pub fn zero_test_with<R: Rng>(&self, rng: &mut R) -> ZeroTest {
        let dim = self.max_coord().map_or(0, |v| v + 1);
        match self.as_ratfunc() {
            Some(r) => {
                if !r.numerator().is_zero() {
                    return ZeroTest::Nonzero;
                }
                for _ in 0..100 {
                    let p: Vec<_> = (0..dim).map(|_| random_rational(rng)).collect();
                    match self.eval_exact(&p) {
                        Ok(v) => {
                            assert!(num_traits::Zero::is_zero(&v), "canonical zero evaluated nonzero");
                            break;
                        }
                        Err(_) => continue,
                    }
                }
                ZeroTest::Zero
            }
            None => {
                let mut good = 0;
                for _ in 0..FLOAT_SAMPLES * 100 {
                    let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(FLOAT_BOX.0..FLOAT_BOX.1)).collect();
                    let Ok(v) = self.eval_float(&p) else { continue };
                    let scale = magnitude(self, &p).unwrap_or(1.0).max(1.0);
                    if v.abs() > FLOAT_THRESHOLD * scale {
                        return ZeroTest::Nonzero;
                    }
                    good += 1;
                    if good == FLOAT_SAMPLES {
                        return ZeroTest::NumericZero;
                    }
                }
                // Too few admissible samples to certify anything.
                ZeroTest::Nonzero
            }
        }
    }
}

/// Upper bound on the size of the partial sums, used to scale the threshold.
fn magnitude(e: &Expr, p: &[f64]) -> Option<f64> {
    if let Some(r) = e.as_ratfunc() {
        let mut s = 0.0;
        for (m, c) in r.numerator().terms() {
            let mut t = c.to_f64()?;
            for (v, e) in m.factors() {
                t *= p.get(v)?.powi(e as i32);
            }
            s += t.abs();
        }
        let d = if r.is_polynomial() { 1.0 } else { r.denominator().eval_f64(p)?.abs() };
        return Some(s / d);
    }
    Some(match e.node() {
        Node::Const(_) | Node::Coord(_) => unreachable!(),
        Node::Sum(c) => c.iter().map(|t| magnitude(t, p)).sum::<Option<f64>>()?,
        Node::Product(c) => c.iter().map(|t| magnitude(t, p)).product::<Option<f64>>()?,
        Node::Quotient(a, b) => magnitude(a, p)? / b.eval_float(p).ok()?.abs(),
        Node::Pow(a, n) if *n > 0 => magnitude(a, p)?.powi(*n),
        _ => e.eval_float(p).ok()?.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_scalar;

    const XY: [&str; 2] = ["x1", "x2"];

    #[test]
    fn binomial_expansion_is_zero() {
        let e = parse_scalar("(x1+1)^2 - x1^2 - 2*x1 - 1", &XY).unwrap();
        assert_eq!(e.zero_test(), ZeroTest::Zero);
    }

    #[test]
    fn nonzero_polynomial() {
        let e = parse_scalar("x1*x2 - x2", &XY).unwrap();
        assert_eq!(e.zero_test(), ZeroTest::Nonzero);
    }

    #[test]
    fn exponential_identity_is_numeric_only() {
        let e = parse_scalar("exp(x1)*exp(-x1) - 1", &XY).unwrap();
        assert_eq!(e.zero_test(), ZeroTest::NumericZero);
        let f = parse_scalar("exp(x1)*exp(-x1) - 1 + x2/1000000", &XY).unwrap();
        assert_eq!(f.zero_test(), ZeroTest::Nonzero);
    }

    #[test]
    fn large_terms_use_relative_threshold() {
        let e = parse_scalar("exp(30*x1)*exp(-30*x1)*exp(20*x2) - exp(20*x2)", &XY).unwrap();
        assert_eq!(e.zero_test(), ZeroTest::NumericZero);
    }
}
