//! Literal evaluation of the known case analyses for the catalog families.
//!
//! Inputs outside the printed normal forms get [`Prediction::NotCovered`];
//! no attempt is made to bring a model into normal form by a linear change
//! of coordinates.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::{Model, SurfaceConstants};
use crate::expr::{integer, rational, EvalPoint, Rational};
use crate::geometry::rank_at;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prediction {
    Dim(usize),
    NotCovered,
}

impl Prediction {
    pub fn dim(self) -> Option<usize> {
        match self {
            Self::Dim(d) => Some(d),
            Self::NotCovered => None,
        }
    }
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dim(d) => write!(f, "{d}"),
            Self::NotCovered => f.write_str("not-covered"),
        }
    }
}

impl Serialize for Prediction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Dim(d) => s.serialize_u64(*d as u64),
            Self::NotCovered => s.serialize_str("not-covered"),
        }
    }
}

/// Predicted `dim E(μ)` for a catalog model.
pub fn expected_dimension(model: &Model, mu: &Rational) -> Prediction {
    match model {
        Model::TypeA(c) => type_a(model, c, mu),
        Model::TypeB(c) => type_b(model, c, mu),
        Model::ExampleB1 => Prediction::Dim(if *mu == rational(-3, 5) {
            2
        } else if mu.is_zero() {
            1
        } else {
            0
        }),
        Model::ExampleB2 { x, z, w, .. } => example_b2(x, z, w, mu),
    }
}

/// Ricci data at the default basepoint: (is flat, rank ρ, ρ_s vanishes).
fn ricci_data(model: &Model) -> (bool, usize, bool) {
    let m = model.manifold();
    let parts = m.ricci();
    let EvalPoint::Exact(p) = model.default_basepoint() else { unreachable!("catalog basepoints are exact") };
    let rank = rank_at(&parts.rho, &p).expect("basepoint is admissible");
    let flat = parts.rho.is_zero().holds();
    (flat, rank, parts.sym.is_zero().holds())
}

fn rank_dichotomy(rank: usize) -> Prediction {
    match rank {
        1 => Prediction::Dim(2),
        2 => Prediction::Dim(0),
        _ => Prediction::NotCovered,
    }
}

fn type_a(model: &Model, c: &SurfaceConstants, mu: &Rational) -> Prediction {
    let (flat, rank, _) = ricci_data(model);
    if flat {
        return Prediction::Dim(3);
    }
    if *mu == integer(-1) {
        return Prediction::Dim(3);
    }
    if mu.is_zero() {
        let [c11_1, _, c12_1, _, c22_1, _] = c;
        let upper_zero = c12_1.is_zero() && c22_1.is_zero();
        return if upper_zero && (c11_1.is_one() || c11_1.is_zero()) {
            Prediction::Dim(2)
        } else {
            Prediction::NotCovered
        };
    }
    rank_dichotomy(rank)
}

fn type_b(model: &Model, c: &SurfaceConstants, mu: &Rational) -> Prediction {
    let (flat, rank, sym_zero) = ricci_data(model);
    if flat {
        return Prediction::Dim(3);
    }
    if mu.is_zero() || sym_zero {
        return type_b_yamabe(c);
    }
    if *mu == integer(-1) {
        return type_b_minus_one(c);
    }
    let [_, _, c12_1, _, c22_1, c22_2] = c;
    if c12_1.is_zero() && c22_1.is_zero() && c22_2.is_zero() {
        // Also Type A.
        return rank_dichotomy(rank);
    }
    type_b_generic(c, mu)
}

/// `E(0)` is `Span{1}` unless some non-constant function of `x¹` or some
/// linear function lies in it.
fn type_b_yamabe(c: &SurfaceConstants) -> Prediction {
    let [c11_1, c11_2, c12_1, c12_2, c22_1, c22_2] = c;
    let first = [c11_1, c12_1, c22_1];
    let second = [c11_2, c12_2, c22_2];
    let power_of_x1 = c12_1.is_zero() && c22_1.is_zero();
    // The two rows are linearly dependent iff all 2×2 minors vanish.
    let dependent = (0..3).all(|a| (a + 1..3).all(|b| (first[a] * second[b] - first[b] * second[a]).is_zero()));
    Prediction::Dim(if power_of_x1 || dependent { 2 } else { 1 })
}

fn sign_of(c22_1: &Rational) -> Option<Rational> {
    (c22_1.is_one() || *c22_1 == integer(-1)).then(|| c22_1.clone())
}

fn type_b_minus_one(c: &SurfaceConstants) -> Prediction {
    let [c11_1, c11_2, c12_1, c12_2, c22_1, c22_2] = c;
    let two = integer(2);
    if c22_1.is_zero() && *c22_2 == *c12_1 && !c12_1.is_zero() {
        return Prediction::Dim(1);
    }
    if let Some(e) = sign_of(c22_1) {
        let one_b = c12_1.is_zero()
            && !c22_2.is_zero()
            && *c22_2 == &two * &e * c11_2
            && *c11_1 == integer(1) + &two * c12_2 + &e * c11_2 * c11_2;
        if one_b {
            return Prediction::Dim(1);
        }
        let two_b = c12_1.is_zero()
            && c11_2.is_zero()
            && c22_2.is_zero()
            && !c12_2.is_zero()
            && *c11_1 == integer(1) + &two * c12_2;
        if two_b {
            return Prediction::Dim(3);
        }
    }
    if c12_1.is_zero() && c22_1.is_zero() && c22_2.is_zero() {
        return Prediction::Dim(3);
    }
    Prediction::NotCovered
}

fn type_b_generic(c: &SurfaceConstants, mu: &Rational) -> Prediction {
    let [c11_1, c11_2, c12_1, c12_2, c22_1, c22_2] = c;
    let two = integer(2);
    let Some(e) = sign_of(c22_1) else {
        return Prediction::NotCovered;
    };
    if !c12_1.is_zero() || *c22_2 != &two * &e * c11_2 {
        return Prediction::NotCovered;
    }
    let delta = integer(1) - c11_1 + c12_2;
    if delta.is_zero() {
        return Prediction::NotCovered;
    }
    if *c11_1 == integer(-1) + c12_2 && c11_2.is_zero() {
        let special = c12_2 / &two;
        return Prediction::Dim(if !special.is_zero() && *mu == special { 2 } else { 0 });
    }
    let a = c11_2;
    let t = &e * a * a;
    let two_b = !a.is_zero()
        && *c11_1 == -(integer(5) + integer(16) * &t) / &two
        && *c12_2 == -(integer(3) + integer(8) * &t) / &two;
    if two_b {
        let special = -(integer(3) + integer(8) * &t) / (integer(4) + integer(8) * &t);
        return Prediction::Dim(if *mu == special { 2 } else { 0 });
    }
    Prediction::Dim(if *mu == tc3_family_mu(c).expect("delta checked") { 1 } else { 0 })
}

/// The eigenvalue `Δ⁻²{1 + 2C12² ± 2(C11²)² − (C11¹ − C12²)²}` with
/// `Δ = 1 − C11¹ + C12²`, sign taken from `C22¹ = ±1`; `None` when `Δ = 0`.
pub fn tc3_family_mu(c: &SurfaceConstants) -> Option<Rational> {
    let [c11_1, c11_2, _, c12_2, c22_1, _] = c;
    let delta = integer(1) - c11_1 + c12_2;
    if delta.is_zero() {
        return None;
    }
    let d = c11_1 - c12_2;
    let num = integer(1) + integer(2) * c12_2 + integer(2) * c22_1 * c11_2 * c11_2 - &d * &d;
    Some(num / (&delta * &delta))
}

fn example_b2(x: &Rational, z: &Rational, w: &Rational, mu: &Rational) -> Prediction {
    if *mu != rational(-1, 2) {
        return Prediction::NotCovered;
    }
    if x.is_zero() || (w == x && z.is_one()) {
        return Prediction::Dim(4);
    }
    if z.is_one() {
        return Prediction::Dim(2);
    }
    if z.is_zero() {
        return Prediction::Dim(0);
    }
    let special = (x + integer(2) * x * z - x * z * z) / (integer(2) * z);
    Prediction::Dim(if *w == special { 1 } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{parse_params, Family, Sign};

    fn predict(f: Family, params: &str, mu: Rational) -> Prediction {
        expected_dimension(&f.build(&parse_params(params).unwrap()).unwrap(), &mu)
    }

    #[test]
    fn example_b2_table() {
        let mu = rational(-1, 2);
        assert_eq!(predict(Family::ExampleB2, "1,0,0,0", mu.clone()), Prediction::Dim(0));
        assert_eq!(predict(Family::ExampleB2, "1,0,2,1/4", mu.clone()), Prediction::Dim(1));
        assert_eq!(predict(Family::ExampleB2, "1,0,1,0", mu.clone()), Prediction::Dim(2));
        assert_eq!(predict(Family::ExampleB2, "0,5,7,-2", mu.clone()), Prediction::Dim(4));
        assert_eq!(predict(Family::ExampleB2, "1,0,1,1", mu), Prediction::Dim(4));
        assert_eq!(predict(Family::ExampleB2, "1,0,1,0", integer(1)), Prediction::NotCovered);
    }

    #[test]
    fn surface_cases() {
        assert_eq!(predict(Family::Tc3TwoA(Sign::Plus), "1", rational(1, 2)), Prediction::Dim(2));
        assert_eq!(predict(Family::Tc3TwoA(Sign::Minus), "1", integer(2)), Prediction::Dim(0));
        assert_eq!(predict(Family::Tc2TwoB(Sign::Plus), "1", integer(-1)), Prediction::Dim(3));
        assert_eq!(predict(Family::Tc2OneA, "0,0,0,1", integer(-1)), Prediction::Dim(1));
        assert_eq!(predict(Family::TypeB, "0,0,0,0,0,0", integer(5)), Prediction::Dim(3));
        assert_eq!(predict(Family::ExampleEA2, "0,1/2,0", integer(-1)), Prediction::Dim(3));
        assert_eq!(predict(Family::ExampleEA2, "0,1/2,0", integer(0)), Prediction::Dim(2));
        assert_eq!(predict(Family::ExampleEA2, "0,1/2,0", integer(2)), Prediction::Dim(2));
        assert_eq!(predict(Family::ExampleB1, "", rational(-3, 5)), Prediction::Dim(2));
    }

    #[test]
    fn two_b_eigenvalue_matches_family_formula() {
        for sign in [Sign::Plus, Sign::Minus] {
            let Model::TypeB(c) = Family::Tc3TwoB(sign).build(&[integer(1)]).unwrap() else { unreachable!() };
            let t = sign.value();
            let special = -(integer(3) + integer(8) * &t) / (integer(4) + integer(8) * &t);
            assert_eq!(tc3_family_mu(&c), Some(special));
        }
    }

    #[test]
    fn prediction_serializes() {
        assert_eq!(serde_json::to_string(&Prediction::Dim(2)).unwrap(), "2");
        assert_eq!(serde_json::to_string(&Prediction::NotCovered).unwrap(), "\"not-covered\"");
    }
}
