//! Deformation to a connection with vanishing symmetric Ricci tensor, given a
//! solution of the quasi-Einstein equation at the distinguished eigenvalue.

use super::{deform, ProjectiveChange};
use crate::expr::{CompiledExpr, EvalPoint, Expr};
use crate::geometry::{AffineManifold, TensorField};
use crate::qe_solver::{distinguished_eigenvalue, CompiledJetSystem, JetSystem, DEFAULT_STEPS};
use crate::verdict::Verdict;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct GaugeResult {
    pub manifold: AffineManifold,
    pub rho_s: TensorField,
    pub verdict: Verdict,
}

/// Deform by `dg` where `e^{−g} ∈ E(μ_m, ∇)`; the result should have `ρ_s = 0`.
pub fn ricci_flat_gauge(manifold: &AffineManifold, g: &Expr) -> Result<GaugeResult> {
    let m = manifold.dim();
    let f = Expr::exp(&g.neg());
    if !manifold.apply_qe_operator(&distinguished_eigenvalue(m), &f).is_zero().holds() {
        return Err(Error::Precondition("exp(-g) does not solve the quasi-Einstein equation at mu_m".into()));
    }
    let deformed = deform(manifold, &ProjectiveChange::from_potential(g, m))?;
    let rho_s = deformed.ricci().sym;
    let verdict = rho_s.is_zero();
    Ok(GaugeResult { manifold: deformed, rho_s, verdict })
}

/// Largest `|ρ_s|` component of `deform(∇, dg)` with `g = −log f`, where `f`
/// is the solution with initial jet `u0` at `p`, evaluated at `points`.
///
/// `f` and its derivatives come from jet transport along straight segments
/// from `p`; second derivatives come from the jet equation itself, and the
/// deformed Ricci tensor is formed directly from the deformed symbols.
pub fn numeric_gauge_residual(
    manifold: &AffineManifold,
    p: &EvalPoint,
    u0: &[f64],
    points: &[Vec<f64>],
) -> Result<f64> {
    manifold.check_point(p)?;
    let m = manifold.dim();
    let mu = distinguished_eigenvalue(m);
    let mu_f = num_traits::ToPrimitive::to_f64(&mu).expect("finite");
    let system = CompiledJetSystem::new(&JetSystem::new(manifold, &mu));
    let gamma: Vec<CompiledExpr> = (0..m * m * m).map(|f| CompiledExpr::new(flat_gamma(manifold, f))).collect();
    let dgamma: Vec<CompiledExpr> =
        (0..m * m * m * m).map(|f| CompiledExpr::new(&flat_gamma(manifold, f / m).diff(f % m))).collect();
    let rho_s = manifold.ricci().sym;
    let rho_s: Vec<CompiledExpr> = rho_s.iter().map(|(_, e)| CompiledExpr::new(e)).collect();
    let base = p.to_f64();
    let mut worst: f64 = 0.0;
    for x in points {
        let u = system.transport(&[base.clone(), x.clone()], u0, DEFAULT_STEPS)?;
        let f = u[0];
        if f <= 0.0 {
            return Err(Error::Precondition(format!("solution is not positive at {x:?}")));
        }
        let dp: Vec<f64> = u[1..].to_vec();
        let g1: Vec<f64> = dp.iter().map(|q| -q / f).collect();
        // ∂_l p_i from the jet equation.
        let ddf = |l: usize, i: usize| {
            (0..m).map(|k| gamma[(l * m + i) * m + k].eval(x) * dp[k]).sum::<f64>()
                + mu_f * f * rho_s[l * m + i].eval(x)
        };
        let g2 = |i: usize, l: usize| -ddf(l, i) / f + dp[i] * dp[l] / (f * f);
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let gt = |i: usize, j: usize, k: usize| {
            gamma[(i * m + j) * m + k].eval(x) + delta(i, k) * g1[j] + delta(j, k) * g1[i]
        };
        let dgt = |l: usize, i: usize, j: usize, k: usize| {
            dgamma[((i * m + j) * m + k) * m + l].eval(x) + delta(i, k) * g2(j, l) + delta(j, k) * g2(i, l)
        };
        let rho = |j: usize, k: usize| {
            let mut r = 0.0;
            for i in 0..m {
                r += dgt(i, j, k, i) - dgt(j, i, k, i);
                for n in 0..m {
                    r += gt(i, n, i) * gt(j, k, n) - gt(j, n, i) * gt(i, k, n);
                }
            }
            r
        };
        for j in 0..m {
            for k in j..m {
                let s = 0.5 * (rho(j, k) + rho(k, j));
                if !s.is_finite() {
                    return Err(Error::NonFinite);
                }
                worst = worst.max(s.abs());
            }
        }
    }
    Ok(worst)
}

fn flat_gamma(manifold: &AffineManifold, f: usize) -> &Expr {
    let m = manifold.dim();
    manifold.gamma(f / (m * m), (f / m) % m, f % m)
}
