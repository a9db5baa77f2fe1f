//! Homogeneous model families with known quasi-Einstein dimensions, the
//! literal case analysis predicting those dimensions, solver cross-checks
//! and parameter sweeps.
//!
//! Surface constants are always ordered `[C11¹, C11², C12¹, C12², C22¹, C22²]`.

mod predict;
mod sweep;

use rand::Rng;
use serde::Serialize;

use crate::expr::{format_rational, integer, parse_rational, rational, EvalPoint, Expr, Rational};
use crate::geometry::{default_coords, AffineManifold};
use crate::sample::small_rational;
use crate::{Error, Result};

pub use predict::{expected_dimension, tc3_family_mu, Prediction};
pub use sweep::{crosscheck, sweep, CrossCheck, SweepReport, SweepRow};

/// `[C11¹, C11², C12¹, C12², C22¹, C22²]`.
pub type SurfaceConstants = [Rational; 6];

/// Index of `C_ij^k` (0-based, `i <= j`) in [`SurfaceConstants`].
fn slot(i: usize, j: usize, k: usize) -> usize {
    let pair = match (i.min(j), i.max(j)) {
        (0, 0) => 0,
        (0, 1) => 1,
        _ => 2,
    };
    pair * 2 + k
}

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    /// Constant Christoffel symbols on the plane.
    TypeA(SurfaceConstants),
    /// `Γ_ij^k = C_ij^k / x¹` on the half-plane `x¹ ≠ 0`.
    TypeB(SurfaceConstants),
    /// Three-dimensional constant connection with nondegenerate Ricci tensor.
    ExampleB1,
    /// Three-dimensional constant family `M_{x,y,z,w}`.
    ExampleB2 { x: Rational, y: Rational, z: Rational, w: Rational },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> Rational {
        match self {
            Self::Plus => integer(1),
            Self::Minus => integer(-1),
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            Self::Plus => "+",
            Self::Minus => "-",
        }
    }
}

/// Named families accepted by [`Family::build`], each with its parameter list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Six constants.
    TypeA,
    /// Six constants.
    TypeB,
    ExampleB1,
    /// `x, y, z, w`.
    ExampleB2,
    /// Type A with `Γ11¹ = 1`, `Γ12¹ = Γ22¹ = 0`; params `Γ11², Γ12², Γ22²`.
    ExampleEA2,
    /// Type A with `Γ11¹ = Γ12¹ = Γ22¹ = 0`; params `Γ11², Γ12², Γ22²`.
    ExampleEA3,
    /// Type B, `C22¹ = 0`, `C22² = C12¹ = c ≠ 0`; params `C11¹, C11², C12², c`.
    Tc2OneA,
    /// Type B, `C22¹ = ±1`, `C12¹ = 0`, `C22² = ±2a ≠ 0`, `C11¹ = 1 + 2s ± a²`; params `a, s`.
    Tc2OneB(Sign),
    /// Type B, `C12¹ = C22¹ = C22² = 0`; params `C11¹, C11², C12²`.
    Tc2TwoA,
    /// Type B, `C11¹ = 1 + 2s`, `C12² = s ≠ 0`, `C22¹ = ±1`, rest zero; param `s`.
    Tc2TwoB(Sign),
    /// Type B, `C22¹ = ±1`, `C12¹ = 0`, `C22² = ±2 C11²`; params `C11¹, C11², C12²`.
    Tc3One(Sign),
    /// Type B, `C11¹ = −1 + s`, `C12² = s`, `C22¹ = ±1`, rest zero; param `s`.
    Tc3TwoA(Sign),
    /// Type B, `C11¹ = −(5 ± 16a²)/2`, `C12² = −(3 ± 8a²)/2`, `C22¹ = ±1`, `C22² = ±2a`, `C11² = a`; param `a`.
    Tc3TwoB(Sign),
}

impl Family {
    pub const ALL: [Family; 17] = [
        Self::TypeA,
        Self::TypeB,
        Self::ExampleB1,
        Self::ExampleB2,
        Self::ExampleEA2,
        Self::ExampleEA3,
        Self::Tc2OneA,
        Self::Tc2OneB(Sign::Plus),
        Self::Tc2OneB(Sign::Minus),
        Self::Tc2TwoA,
        Self::Tc2TwoB(Sign::Plus),
        Self::Tc2TwoB(Sign::Minus),
        Self::Tc3One(Sign::Plus),
        Self::Tc3One(Sign::Minus),
        Self::Tc3TwoA(Sign::Plus),
        Self::Tc3TwoA(Sign::Minus),
        Self::Tc3TwoB(Sign::Plus),
    ];

    pub fn name(self) -> String {
        match self {
            Self::TypeA => "typeA".into(),
            Self::TypeB => "typeB".into(),
            Self::ExampleB1 => "exampleB1".into(),
            Self::ExampleB2 => "exampleB2".into(),
            Self::ExampleEA2 => "exampleEA2".into(),
            Self::ExampleEA3 => "exampleEA3".into(),
            Self::Tc2OneA => "tc2-1a".into(),
            Self::Tc2OneB(s) => format!("tc2-1b{}", s.suffix()),
            Self::Tc2TwoA => "tc2-2a".into(),
            Self::Tc2TwoB(s) => format!("tc2-2b{}", s.suffix()),
            Self::Tc3One(s) => format!("tc3-1{}", s.suffix()),
            Self::Tc3TwoA(s) => format!("tc3-2a{}", s.suffix()),
            Self::Tc3TwoB(s) => format!("tc3-2b{}", s.suffix()),
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        let all = Self::ALL.into_iter().chain([Self::Tc3TwoB(Sign::Minus)]);
        all.into_iter().find(|f| f.name() == name).ok_or_else(|| Error::Params(format!("unknown family `{name}`")))
    }

    pub fn param_count(self) -> usize {
        match self {
            Self::TypeA | Self::TypeB => 6,
            Self::ExampleB1 => 0,
            Self::ExampleB2 | Self::Tc2OneA => 4,
            Self::ExampleEA2 | Self::ExampleEA3 | Self::Tc2TwoA | Self::Tc3One(_) => 3,
            Self::Tc2OneB(_) => 2,
            Self::Tc2TwoB(_) | Self::Tc3TwoA(_) | Self::Tc3TwoB(_) => 1,
        }
    }

    pub fn build(self, params: &[Rational]) -> Result<Model> {
        if params.len() != self.param_count() {
            return Err(Error::Params(format!(
                "family {} takes {} parameters, got {}",
                self.name(),
                self.param_count(),
                params.len()
            )));
        }
        let p = |i: usize| params[i].clone();
        let zero = || integer(0);
        let consts = |c: [Rational; 6]| c;
        Ok(match self {
            Self::TypeA => Model::TypeA(consts([p(0), p(1), p(2), p(3), p(4), p(5)])),
            Self::TypeB => Model::TypeB(consts([p(0), p(1), p(2), p(3), p(4), p(5)])),
            Self::ExampleB1 => Model::ExampleB1,
            Self::ExampleB2 => Model::ExampleB2 { x: p(0), y: p(1), z: p(2), w: p(3) },
            Self::ExampleEA2 => Model::TypeA([integer(1), p(0), zero(), p(1), zero(), p(2)]),
            Self::ExampleEA3 => Model::TypeA([zero(), p(0), zero(), p(1), zero(), p(2)]),
            Self::Tc2OneA => Model::TypeB([p(0), p(1), p(3), p(2), zero(), p(3)]),
            Self::Tc2OneB(s) => {
                let (a, t, e) = (p(0), p(1), s.value());
                let c11 = integer(1) + integer(2) * &t + &e * &a * &a;
                Model::TypeB([c11, a.clone(), zero(), t, e.clone(), integer(2) * e * a])
            }
            Self::Tc2TwoA => Model::TypeB([p(0), p(1), zero(), p(2), zero(), zero()]),
            Self::Tc2TwoB(s) => Model::TypeB([integer(1) + integer(2) * p(0), zero(), zero(), p(0), s.value(), zero()]),
            Self::Tc3One(s) => Model::TypeB([p(0), p(1), zero(), p(2), s.value(), integer(2) * s.value() * p(1)]),
            Self::Tc3TwoA(s) => Model::TypeB([integer(-1) + p(0), zero(), zero(), p(0), s.value(), zero()]),
            Self::Tc3TwoB(s) => {
                let (a, e) = (p(0), s.value());
                let a2 = &a * &a;
                let c11 = -(integer(5) + integer(16) * &e * &a2) / integer(2);
                let c12 = -(integer(3) + integer(8) * &e * &a2) / integer(2);
                Model::TypeB([c11, a.clone(), zero(), c12, e.clone(), integer(2) * e * a])
            }
        })
    }
}

/// Parse comma-separated rationals `p/q`.
pub fn parse_params(text: &str) -> Result<Vec<Rational>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(parse_rational).collect()
}

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Self::TypeA(_) | Self::TypeB(_) => 2,
            Self::ExampleB1 | Self::ExampleB2 { .. } => 3,
        }
    }

    pub fn manifold(&self) -> AffineManifold {
        let c = |r: &Rational| Expr::constant(r.clone());
        let built = match self {
            Self::TypeA(k) => AffineManifold::from_fn(2, |i, j, l| c(&k[slot(i, j, l)])),
            Self::TypeB(k) => {
                let inv_x1 = Expr::one().checked_div(&Expr::coord(0)).expect("nonzero");
                AffineManifold::from_fn_with(default_coords(2), vec![Expr::coord(0)], |i, j, l| {
                    c(&k[slot(i, j, l)]).mul(&inv_x1)
                })
            }
            Self::ExampleB1 => AffineManifold::from_fn(3, |i, j, k| match (i, j, k) {
                (0, 1, 2) => Expr::int(1),
                (0, 2, 0) => Expr::int(3),
                (1, 2, 1) => Expr::int(4),
                (2, 2, 2) => Expr::int(5),
                _ => Expr::zero(),
            }),
            Self::ExampleB2 { x, y, z, w } => AffineManifold::from_fn(3, |i, j, k| match (i, j, k) {
                (0, 0, 0) => c(z),
                (0, 1, 0) => Expr::one(),
                (0, 2, 0) => c(x),
                (1, 1, 1) => Expr::one(),
                (1, 2, 0) => c(x),
                (2, 2, 1) => c(y),
                (2, 2, 2) => c(w),
                _ => Expr::zero(),
            }),
        };
        built.expect("catalog models are symmetric")
    }

    /// Origin for constant models, `(1, 0)` for Type B.
    pub fn default_basepoint(&self) -> EvalPoint {
        let mut p = vec![integer(0); self.dim()];
        if matches!(self, Self::TypeB(_)) {
            p[0] = integer(1);
        }
        EvalPoint::Exact(p)
    }

    pub fn params(&self) -> Vec<Rational> {
        match self {
            Self::TypeA(k) | Self::TypeB(k) => k.to_vec(),
            Self::ExampleB1 => Vec::new(),
            Self::ExampleB2 { x, y, z, w } => vec![x.clone(), y.clone(), z.clone(), w.clone()],
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Self::TypeA(_) => Family::TypeA,
            Self::TypeB(_) => Family::TypeB,
            Self::ExampleB1 => Family::ExampleB1,
            Self::ExampleB2 { .. } => Family::ExampleB2,
        }
    }

    pub fn describe(&self) -> ModelDescription {
        ModelDescription { family: self.family().name(), params: self.params().iter().map(format_rational).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelDescription {
    pub family: String,
    pub params: Vec<String>,
}

fn random_constants<R: Rng + ?Sized>(rng: &mut R) -> SurfaceConstants {
    std::array::from_fn(|_| small_rational(rng, 3, 3))
}

/// Random non-flat Type A surface: constants in `[-3, 3]` with denominators up to 3.
pub fn random_type_a<R: Rng + ?Sized>(rng: &mut R) -> Model {
    loop {
        let m = Model::TypeA(random_constants(rng));
        if !m.manifold().ricci().rho.is_zero().holds() {
            return m;
        }
    }
}

/// Random non-flat Type B surface, drawn like [`random_type_a`].
pub fn random_type_b<R: Rng + ?Sized>(rng: &mut R) -> Model {
    loop {
        let m = Model::TypeB(random_constants(rng));
        if !m.manifold().ricci().rho.is_zero().holds() {
            return m;
        }
    }
}

/// `α = (∇ρ)_111² / ρ_11³`, defined when `ρ_11 ≢ 0` and `∇ρ` is a multiple
/// of `dx¹⊗dx¹⊗dx¹`.
pub fn alpha_invariant(manifold: &AffineManifold) -> Result<Expr> {
    let rho = manifold.ricci().rho;
    let rho11 = rho.get(&[0, 0]).clone();
    if rho11.zero_test().is_zero() {
        return Err(Error::Precondition("rho_11 vanishes identically".into()));
    }
    let nabla = manifold.covariant_derivative(&rho);
    for (idx, e) in nabla.iter() {
        if idx.iter().any(|&i| i != 0) && !e.zero_test().is_zero() {
            return Err(Error::Precondition("nabla rho is not a multiple of dx1 dx1 dx1".into()));
        }
    }
    let n111 = nabla.get(&[0, 0, 0]);
    n111.mul(n111).checked_div(&rho11.mul(&rho11).mul(&rho11))
}

/// The closed form `4 / (Γ12² − (Γ12²)² + Γ11² Γ22²)` for the E-A.2 surfaces.
pub fn alpha_closed_form(g11_2: &Rational, g12_2: &Rational, g22_2: &Rational) -> Option<Rational> {
    let d = g12_2 - g12_2 * g12_2 + g11_2 * g22_2;
    (!num_traits::Zero::is_zero(&d)).then(|| rational(4, 1) / d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_round_trip_names() {
        for f in Family::ALL {
            assert_eq!(Family::parse(&f.name()).unwrap(), f);
        }
        assert_eq!(Family::parse("tc3-2b-").unwrap(), Family::Tc3TwoB(Sign::Minus));
        assert!(Family::parse("typeC").is_err());
        assert!(Family::TypeA.build(&[integer(1)]).is_err());
    }

    #[test]
    fn example_b2_symbols() {
        let m = Family::ExampleB2.build(&parse_params("1,0,0,0").unwrap()).unwrap().manifold();
        assert_eq!(m.gamma(0, 0, 0).as_constant(), Some(integer(0)));
        assert_eq!(m.gamma(2, 1, 0).as_constant(), Some(integer(1)));
        let rho = m.ricci().rho;
        // ρ_23 = x(z − 1) = −1, ρ_33 = wx − x² + 2y = −1.
        assert_eq!(rho.get(&[1, 2]).as_constant(), Some(integer(-1)));
        assert_eq!(rho.get(&[2, 2]).as_constant(), Some(integer(-1)));
    }

    #[test]
    fn type_b_all_zero_is_flat() {
        let m = Model::TypeB(std::array::from_fn(|_| integer(0))).manifold();
        assert!(m.is_flat().holds());
        assert_eq!(m.excluded().len(), 1);
    }

    #[test]
    fn alpha_on_half_fixture() {
        let m = Family::ExampleEA2.build(&[integer(0), rational(1, 2), integer(0)]).unwrap().manifold();
        assert_eq!(alpha_invariant(&m).unwrap().as_constant(), Some(integer(16)));
        assert_eq!(alpha_closed_form(&integer(0), &rational(1, 2), &integer(0)), Some(integer(16)));
    }
}
