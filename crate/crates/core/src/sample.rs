//! Seeded random sampling of rational and float points.

use num_bigint::BigInt;
use rand::Rng;

use crate::expr::Rational;

/// Numerators and denominators of random rational coordinates are bounded by this.
pub const RATIONAL_BOUND: i64 = 10_000;

/// Float sampling box used by numeric-only zero tests.
pub const FLOAT_BOX: (f64, f64) = (0.1, 1.5);

/// Attempts before giving up on an admissible point.
pub const MAX_SAMPLE_TRIES: usize = 100;

pub fn random_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let n = rng.gen_range(-RATIONAL_BOUND..=RATIONAL_BOUND);
    let d = rng.gen_range(1..=RATIONAL_BOUND);
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// A random rational with numerator in `[-bound, bound]` and denominator in `1..=max_den`.
pub fn small_rational<R: Rng + ?Sized>(rng: &mut R, bound: i64, max_den: i64) -> Rational {
    let d = rng.gen_range(1..=max_den);
    let n = rng.gen_range(-bound * d..=bound * d);
    Rational::new(BigInt::from(n), BigInt::from(d))
}
