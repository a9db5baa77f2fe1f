//! Rational functions `num / den` over sparse polynomials.
//!
//! Fractions are not reduced by a polynomial GCD. Normalization only strips
//! the common monomial factor and makes the denominator monic, which keeps
//! Christoffel data like `C / x1` compact while staying exact.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{Monomial, Poly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn var(index: usize) -> Self {
        Self::from_poly(Poly::var(index))
    }

    pub fn from_poly(num: Poly) -> Self {
        Self { num, den: Poly::one() }
    }

    /// Build `num / den`; `None` if `den` is the zero polynomial.
    pub fn new(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if let Some(c) = den.as_constant() {
            return Self::from_poly(num.scale(&c.recip()));
        }
        let g = num.monomial_content().gcd(&den.monomial_content());
        let (num, den) = if g.is_one() { (num, den) } else { (num.div_monomial(&g), den.div_monomial(&g)) };
        let lc = den.leading().map(|(_, c)| c.clone()).expect("nonzero denominator");
        if lc.is_one() {
            Self { num, den }
        } else {
            let inv = lc.recip();
            let den = den.scale(&inv);
            if den.is_one() {
                Self::from_poly(num.scale(&inv))
            } else {
                Self { num: num.scale(&inv), den }
            }
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.is_polynomial() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.den == other.den {
            return Self::normalized(self.num.add(&other.num), self.den.clone());
        }
        // Monic single-term denominators combine over their lcm.
        if let (Some((ma, _)), Some((mb, _))) = (self.den.single_term(), other.den.single_term()) {
            let l = ma.lcm(mb);
            let one = BigRational::one();
            let fa = l.div(ma).expect("lcm");
            let fb = l.div(mb).expect("lcm");
            let num = self.num.mul_term(&one, &fa).add(&other.num.mul_term(&one, &fb));
            return Self::normalized(num, Poly::term(one, l));
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        Self::normalized(num, self.den.mul(&other.den))
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self { num: self.num.scale(k), den: self.den.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        Self::normalized(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    /// Multiplicative inverse; `None` for the zero function.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        Some(self.mul(&other.recip()?))
    }

    pub fn powi(&self, exp: i32) -> Option<Self> {
        let base = if exp < 0 { self.recip()? } else { self.clone() };
        let e = exp.unsigned_abs();
        Some(Self::normalized(base.num.pow(e), base.den.pow(e)))
    }

    pub fn derivative(&self, index: usize) -> Self {
        if self.is_polynomial() {
            return Self::from_poly(self.num.derivative(index));
        }
        let dn = self.num.derivative(index);
        let dd = self.den.derivative(index);
        if dd.is_zero() {
            return Self::normalized(dn, self.den.clone());
        }
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Self::normalized(num, self.den.mul(&self.den))
    }

    pub fn max_var(&self) -> Option<usize> {
        self.num.max_var().max(self.den.max_var())
    }

    /// Exact value. `Err(true)` if the denominator vanishes, `Err(false)` if
    /// the point is too short for the variables used.
    pub fn eval_exact(&self, point: &[BigRational]) -> Result<BigRational, bool> {
        let d = self.den.eval_exact(point).ok_or(false)?;
        if d.is_zero() {
            return Err(true);
        }
        let n = self.num.eval_exact(point).ok_or(false)?;
        Ok(n / d)
    }

    pub fn eval_f64(&self, point: &[f64]) -> Option<f64> {
        let n = self.num.eval_f64(point)?;
        if self.is_polynomial() {
            return Some(n);
        }
        Some(n / self.den.eval_f64(point)?)
    }

    /// The common monomial factor of the denominator, if it is a single term.
    pub fn monomial_denominator(&self) -> Option<&Monomial> {
        self.den.single_term().map(|(m, _)| m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn type_b_denominators_stay_monomial() {
        let inv_x = RatFunc::var(0).recip().unwrap();
        let a = inv_x.scale(&q(3, 1));
        let b = inv_x.powi(2).unwrap().scale(&q(-2, 1));
        let s = a.add(&b);
        assert_eq!(s.denominator(), &Poly::var(0).pow(2));
        // d/dx1 (3/x1) = -3/x1^2
        let d = a.derivative(0);
        assert_eq!(d, inv_x.powi(2).unwrap().scale(&q(-3, 1)));
        // x1 * (1/x1) collapses
        assert_eq!(RatFunc::var(0).mul(&inv_x), RatFunc::one());
    }

    #[test]
    fn general_denominator_arithmetic() {
        // 1/(1+x1) - 1/(1+x1) = 0 and x1/(1+x1) + 1/(1+x1) = 1 (after eval)
        let den = Poly::var(0).add(&Poly::one());
        let f = RatFunc::new(Poly::one(), den.clone()).unwrap();
        assert!(f.sub(&f).is_zero());
        let g = RatFunc::new(Poly::var(0), den).unwrap();
        let s = f.add(&g);
        assert_eq!(s.eval_exact(&[q(7, 3)]).unwrap(), q(1, 1));
        assert_eq!(f.eval_exact(&[q(-1, 1)]), Err(true));
    }

    #[test]
    fn division_by_zero_function_is_rejected() {
        assert!(RatFunc::one().div(&RatFunc::zero()).is_none());
        assert!(RatFunc::new(Poly::one(), Poly::zero()).is_none());
    }
}
