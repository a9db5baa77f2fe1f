#![allow(dead_code)]

use affine_qe::expr::{integer, Expr, Rational};
use affine_qe::geometry::{default_coords, AffineManifold};
use affine_qe::sample::small_rational;
use rand::Rng;

pub fn coords(m: usize) -> Vec<String> {
    default_coords(m)
}

/// Random polynomial of total degree at most `deg` with small rational coefficients.
pub fn random_poly<R: Rng>(rng: &mut R, m: usize, deg: u32, terms: usize) -> Expr {
    let mut acc = Expr::zero();
    for _ in 0..terms {
        let mut t = Expr::constant(small_rational(rng, 3, 3));
        let d = rng.gen_range(0..=deg);
        for _ in 0..d {
            t = t.mul(&Expr::coord(rng.gen_range(0..m)));
        }
        acc = acc.add(&t);
    }
    acc
}

/// Symmetric connection whose symbols are sparse random polynomials of degree ≤ 1.
pub fn random_manifold<R: Rng>(rng: &mut R, m: usize) -> AffineManifold {
    AffineManifold::from_fn(m, |_, _, _| if rng.gen_bool(0.4) { Expr::zero() } else { random_poly(rng, m, 1, 2) })
        .unwrap()
}

/// Constant-coefficient connection on `R^m`.
pub fn random_constant_manifold<R: Rng>(rng: &mut R, m: usize) -> AffineManifold {
    AffineManifold::from_fn(m, |_, _, _| Expr::constant(small_rational(rng, 3, 3))).unwrap()
}

/// `Γ = C / x1` on `x1 ≠ 0`.
pub fn random_homogeneous_manifold<R: Rng>(rng: &mut R, m: usize) -> AffineManifold {
    let inv = Expr::one().checked_div(&Expr::coord(0)).unwrap();
    AffineManifold::from_fn_with(coords(m), vec![Expr::coord(0)], |_, _, _| {
        Expr::constant(small_rational(rng, 3, 3)).mul(&inv)
    })
    .unwrap()
}

pub fn q(n: i64, d: i64) -> Rational {
    integer(n) / integer(d)
}
