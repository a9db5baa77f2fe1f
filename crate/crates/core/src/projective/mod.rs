//! Projective deformations `Γ̃_ij^k = Γ_ij^k + δ_i^k ω_j + δ_j^k ω_i`, the
//! transformation rules for Ricci and the quasi-Einstein operator, and
//! strong projective flatness.

mod chart;
mod gauge;

use serde::Serialize;

use crate::expr::{EvalPoint, Expr};
use crate::geometry::{AffineManifold, TensorField, Valence};
use crate::qe_solver::{distinguished_eigenvalue, solution_dimension, SolutionSpace};
use crate::verdict::Verdict;
use crate::{Error, Result};

pub use chart::{default_radius, geodesic_straightness, grid_around, FlatChart, GEODESIC_SAMPLES};
pub use gauge::{numeric_gauge_residual, ricci_flat_gauge, GaugeResult};

/// A 1-form `ω`, optionally with a potential `g` such that `ω = dg`.
#[derive(Clone, Debug)]
pub struct ProjectiveChange {
    omega: Vec<Expr>,
    potential: Option<Expr>,
}

impl ProjectiveChange {
    pub fn from_omega(omega: Vec<Expr>) -> Self {
        Self { omega, potential: None }
    }

    /// `ω = dg` on an `m`-dimensional chart.
    pub fn from_potential(g: &Expr, m: usize) -> Self {
        Self { omega: g.gradient(m), potential: Some(g.clone()) }
    }

    /// Both forms given; fails unless `dg = ω` identically.
    pub fn with_potential(omega: Vec<Expr>, g: &Expr) -> Result<Self> {
        for (i, w) in omega.iter().enumerate() {
            if !g.diff(i).sub(w).zero_test().is_zero() {
                return Err(Error::Precondition(format!("d(potential) differs from omega in slot {}", i + 1)));
            }
        }
        Ok(Self { omega, potential: Some(g.clone()) })
    }

    pub fn omega(&self) -> &[Expr] {
        &self.omega
    }

    pub fn potential(&self) -> Option<&Expr> {
        self.potential.as_ref()
    }

    pub fn negate(&self) -> Self {
        Self { omega: self.omega.iter().map(Expr::neg).collect(), potential: self.potential.as_ref().map(Expr::neg) }
    }

    /// Closedness of `ω`; holds trivially when a potential is known.
    pub fn is_strong(&self) -> Verdict {
        if self.potential.is_some() {
            return Verdict::Holds;
        }
        let m = self.omega.len();
        let mut acc = Verdict::Holds;
        for i in 0..m {
            for j in i + 1..m {
                acc = acc.and(self.omega[j].diff(i).sub(&self.omega[i].diff(j)).zero_test().into());
            }
        }
        acc
    }
}

pub fn is_strong(omega: &ProjectiveChange) -> Verdict {
    omega.is_strong()
}

/// The deformed connection. The excluded locus is inherited.
pub fn deform(manifold: &AffineManifold, change: &ProjectiveChange) -> Result<AffineManifold> {
    let m = manifold.dim();
    let w = change.omega();
    if w.len() != m {
        return Err(Error::BadDimension(format!("omega has {} components, expected {m}", w.len())));
    }
    AffineManifold::from_fn_with(manifold.coords().to_vec(), manifold.excluded().to_vec(), |i, j, k| {
        let mut e = manifold.gamma(i, j, k).clone();
        if i == k {
            e = e.add(&w[j]);
        }
        if j == k {
            e = e.add(&w[i]);
        }
        e
    })
}

/// `dg ⊗ dg`.
pub fn differential_square(g: &Expr, m: usize) -> TensorField {
    let dg = g.gradient(m);
    TensorField::from_fn(m, Valence::covariant(2), |x| dg[x[0]].mul(&dg[x[1]]))
}

/// `H g − dg ⊗ dg`.
pub fn liouville_tensor(manifold: &AffineManifold, g: &Expr) -> TensorField {
    manifold.hessian(g).sub(&differential_square(g, manifold.dim()))
}

/// `ρ_s(∇̃) − ρ_s(∇) + (m−1)(H g − dg⊗dg)` for `∇̃ = deform(∇, dg)`.
pub fn ricci_transform_residual(manifold: &AffineManifold, g: &Expr) -> Result<TensorField> {
    let m = manifold.dim();
    let deformed = deform(manifold, &ProjectiveChange::from_potential(g, m))?;
    let lhs = deformed.ricci().sym.sub(&manifold.ricci().sym);
    Ok(lhs.add(&liouville_tensor(manifold, g).scale(&Expr::int(m as i64 - 1))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LiouvilleReport {
    /// `ρ_s` unchanged by the deformation.
    pub ricci_preserved: Verdict,
    /// `H g − dg ⊗ dg = 0`.
    pub hessian_condition: Verdict,
}

impl LiouvilleReport {
    pub fn consistent(&self) -> bool {
        self.ricci_preserved.holds() == self.hessian_condition.holds()
    }
}

/// Liouville test for the strong deformation by `dg`.
pub fn liouville_check(manifold: &AffineManifold, g: &Expr) -> Result<LiouvilleReport> {
    let m = manifold.dim();
    let deformed = deform(manifold, &ProjectiveChange::from_potential(g, m))?;
    Ok(LiouvilleReport {
        ricci_preserved: deformed.ricci().sym.sub(&manifold.ricci().sym).is_zero(),
        hessian_condition: liouville_tensor(manifold, g).is_zero(),
    })
}

#[derive(Clone, Debug)]
pub struct FlatnessReport {
    pub space: SolutionSpace,
    pub strongly_flat: bool,
    /// Surfaces only: `ρ` and `∇ρ` totally symmetric.
    pub symmetry_criterion: Option<Verdict>,
}

impl FlatnessReport {
    /// Whether the solver and the symmetry criterion agree (always true for `m > 2`).
    pub fn criteria_agree(&self) -> bool {
        self.symmetry_criterion.is_none_or(|v| v.holds() == self.strongly_flat)
    }
}

/// Strong projective flatness via `dim E(P, μ_m, ∇) = m+1`; surfaces are
/// cross-checked against total symmetry of `ρ` and `∇ρ`.
pub fn strong_flatness_test(manifold: &AffineManifold, p: &EvalPoint) -> Result<FlatnessReport> {
    let m = manifold.dim();
    let space = solution_dimension(manifold, &distinguished_eigenvalue(m), p)?;
    let strongly_flat = space.dim == m + 1;
    let symmetry_criterion = (m == 2).then(|| {
        let rho = manifold.ricci().rho;
        let a = rho.is_totally_symmetric().expect("(0,2) tensor");
        a.and(manifold.covariant_derivative(&rho).is_totally_symmetric().expect("(0,3) tensor"))
    });
    Ok(FlatnessReport { space, strongly_flat, symmetry_criterion })
}
