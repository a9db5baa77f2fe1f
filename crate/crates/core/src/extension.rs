//! Deformed Riemannian extensions
//! `g = dx^i ⊙ dy_i + (Φ_ij − 2 y_k Γ_ij^k) dx^i dx^j` on the cotangent
//! bundle, their Levi-Civita connection, and quasi-Einstein residuals.
//!
//! The bundle chart has coordinates `x1..xm, y1..ym`; expressions from the
//! base manifold use only the first `m` indices and so pull back unchanged.

use crate::expr::{Expr, Rational, ZeroTest};
use crate::geometry::{default_coords, AffineManifold, TensorField, Valence};
use crate::verdict::Verdict;
use crate::{Error, Result};

/// Symmetric metric components on a `2m`-dimensional chart.
#[derive(Clone, Debug)]
pub struct PseudoMetric {
    coords: Vec<String>,
    comps: Vec<Expr>,
    /// `Some(m)` when built by [`deformed_extension`].
    block: Option<usize>,
}

fn bundle_coords(m: usize) -> Vec<String> {
    let mut c = default_coords(m);
    c.extend((1..=m).map(|i| format!("y{i}")));
    c
}

impl PseudoMetric {
    /// General symmetric metric; asymmetry is an error.
    pub fn new(coords: Vec<String>, comps: Vec<Expr>) -> Result<Self> {
        let n = coords.len();
        if comps.len() != n * n {
            return Err(Error::BadDimension(format!("expected {} metric components, got {}", n * n, comps.len())));
        }
        for i in 0..n {
            for j in i + 1..n {
                if comps[i * n + j].sub(&comps[j * n + i]).zero_test() == ZeroTest::Nonzero {
                    return Err(Error::Precondition(format!("metric not symmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        Ok(Self { coords, comps, block: None })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn is_block_extension(&self) -> bool {
        self.block.is_some()
    }

    pub fn get(&self, i: usize, j: usize) -> &Expr {
        &self.comps[i * self.dim() + j]
    }

    pub fn as_tensor(&self) -> TensorField {
        TensorField::from_fn(self.dim(), Valence::covariant(2), |x| self.get(x[0], x[1]).clone())
    }

    /// Inverse metric. Extensions use the closed form
    /// `[[G, I], [I, 0]]^{-1} = [[0, I], [I, −G]]`; other metrics are
    /// inverted through the adjugate.
    pub fn inverse(&self) -> Result<Vec<Expr>> {
        let n = self.dim();
        if let Some(m) = self.block {
            let mut inv = vec![Expr::zero(); n * n];
            for i in 0..m {
                inv[i * n + m + i] = Expr::one();
                inv[(m + i) * n + i] = Expr::one();
                for j in 0..m {
                    inv[(m + i) * n + m + j] = self.get(i, j).neg();
                }
            }
            return Ok(inv);
        }
        let det = determinant(n, |r, c| self.get(r, c).clone());
        if det.zero_test().is_zero() {
            return Err(Error::DegenerateMetric);
        }
        let mut inv = vec![Expr::zero(); n * n];
        for i in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
            for j in 0..n {
                let minor = determinant(n - 1, |r, c| self.get(rows[r], if c < j { c } else { c + 1 }).clone());
                let cof = if (i + j) % 2 == 0 { minor } else { minor.neg() };
                inv[j * n + i] = cof.checked_div(&det)?;
            }
        }
        Ok(inv)
    }
}

/// Determinant by Laplace expansion memoized over column subsets, which
/// keeps every intermediate a polynomial in the entries.
fn determinant(k: usize, entry: impl Fn(usize, usize) -> Expr) -> Expr {
    // table[mask] = det of rows 0..popcount(mask) restricted to the columns in mask.
    let mut table = vec![Expr::zero(); 1 << k];
    table[0] = Expr::one();
    for mask in 1usize..(1 << k) {
        let r = mask.count_ones() as usize - 1;
        let mut acc = Expr::zero();
        for c in 0..k {
            if mask & (1 << c) == 0 {
                continue;
            }
            let sub = &table[mask & !(1 << c)];
            let e = entry(r, c);
            // Expansion along the last row; the sign counts chosen columns left of c.
            let above = (mask & ((1 << c) - 1)).count_ones() as usize;
            if !sub.is_zero_literal() && !e.is_zero_literal() {
                let t = e.mul(sub);
                acc = if (r + above).is_multiple_of(2) { acc.add(&t) } else { acc.sub(&t) };
            }
        }
        table[mask] = acc;
    }
    table[(1 << k) - 1].clone()
}

/// Component grid of a symmetric `m × m` form.
pub type SymmetricGrid = Vec<Vec<Expr>>;

pub fn zero_grid(m: usize) -> SymmetricGrid {
    vec![vec![Expr::zero(); m]; m]
}

/// `g_{∇,Φ}` on the cotangent bundle of `manifold`.
#[allow(clippy::needless_range_loop)]
pub fn deformed_extension(manifold: &AffineManifold, phi: &SymmetricGrid) -> Result<PseudoMetric> {
    let m = manifold.dim();
    if phi.len() != m || phi.iter().any(|r| r.len() != m) {
        return Err(Error::BadDimension(format!("Phi must be {m} x {m}")));
    }
    for i in 0..m {
        for j in i + 1..m {
            if phi[i][j].sub(&phi[j][i]).zero_test() == ZeroTest::Nonzero {
                return Err(Error::Precondition(format!("Phi is not symmetric at ({}, {})", i + 1, j + 1)));
            }
        }
    }
    if phi.iter().flatten().any(|e| e.max_coord().is_some_and(|c| c >= m)) {
        return Err(Error::BadDimension("Phi may depend on the base coordinates only".into()));
    }
    let n = 2 * m;
    let mut comps = vec![Expr::zero(); n * n];
    for i in 0..m {
        for j in 0..m {
            let mut e = phi[i][j].clone();
            for k in 0..m {
                e = e.sub(&Expr::coord(m + k).mul(manifold.gamma(i, j, k)).scale(&Rational::from_integer(2.into())));
            }
            comps[i * n + j] = e;
        }
        comps[i * n + m + i] = Expr::one();
        comps[(m + i) * n + i] = Expr::one();
    }
    Ok(PseudoMetric { coords: bundle_coords(m), comps, block: Some(m) })
}

/// Levi-Civita connection, stored as an affine manifold on the bundle chart.
#[derive(Clone, Debug)]
pub struct MetricConnection {
    pub connection: AffineManifold,
}

/// Koszul formula `Γ_ij^k = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)`.
pub fn levi_civita(g: &PseudoMetric) -> Result<MetricConnection> {
    let n = g.dim();
    let inv = g.inverse()?;
    let dg: Vec<Vec<Expr>> = (0..n * n).map(|f| g.comps[f].gradient(n)).collect();
    let d = |l: usize, i: usize, j: usize| &dg[i * n + j][l];
    let half = Rational::new(1.into(), 2.into());
    // First-kind symbols [ij, l].
    let first: Vec<Expr> = (0..n * n * n)
        .map(|f| {
            let (i, j, l) = (f / (n * n), (f / n) % n, f % n);
            d(i, j, l).add(d(j, i, l)).sub(d(l, i, j)).scale(&half)
        })
        .collect();
    let connection = AffineManifold::from_fn_with(g.coords.clone(), Vec::new(), |i, j, k| {
        (0..n).fold(Expr::zero(), |acc, l| {
            let (a, b) = (&inv[k * n + l], &first[(i * n + j) * n + l]);
            if a.is_zero_literal() || b.is_zero_literal() {
                acc
            } else {
                acc.add(&a.mul(b))
            }
        })
    })?;
    Ok(MetricConnection { connection })
}

impl MetricConnection {
    /// `∂_k g_ij − Γ_ki^l g_lj − Γ_kj^l g_il` as a (0,3) tensor, slot order `(k, i, j)`.
    pub fn compatibility_residual(&self, g: &PseudoMetric) -> TensorField {
        let n = g.dim();
        let c = &self.connection;
        TensorField::from_fn(n, Valence::covariant(3), |x| {
            let (k, i, j) = (x[0], x[1], x[2]);
            (0..n).fold(g.get(i, j).diff(k), |acc, l| {
                acc.sub(&c.gamma(k, i, l).mul(g.get(l, j))).sub(&c.gamma(k, j, l).mul(g.get(i, l)))
            })
        })
    }
}

/// `π*T` for a (0,2) tensor on the base: the `xx` block is `T`, the rest zero.
pub fn pullback(t: &TensorField, n: usize) -> TensorField {
    let m = t.dim();
    TensorField::from_fn(
        n,
        Valence::covariant(2),
        |x| {
            if x[0] < m && x[1] < m {
                t.get(x).clone()
            } else {
                Expr::zero()
            }
        },
    )
}

/// Defects of `H_g π*f = π*H f`, `ρ_g = 2π*ρ_s` and `‖dπ*f‖² = 0`.
#[derive(Clone, Debug)]
pub struct ExtensionResiduals {
    pub hessian: TensorField,
    pub ricci: TensorField,
    pub gradient_norm: Expr,
}

impl ExtensionResiduals {
    pub fn verdict(&self) -> Verdict {
        self.hessian.is_zero().and(self.ricci.is_zero()).and(self.gradient_norm.zero_test().into())
    }
}

pub fn extension_identities_residuals(
    manifold: &AffineManifold,
    phi: &SymmetricGrid,
    f: &Expr,
) -> Result<ExtensionResiduals> {
    let m = manifold.dim();
    let n = 2 * m;
    let g = deformed_extension(manifold, phi)?;
    let lc = levi_civita(&g)?;
    let hessian = lc.connection.hessian(f).sub(&pullback(&manifold.hessian(f), n));
    let two = Expr::int(2);
    let ricci = lc.connection.ricci().rho.sub(&pullback(&manifold.ricci().sym, n).scale(&two));
    let inv = g.inverse()?;
    let df = f.gradient(n);
    let mut gradient_norm = Expr::zero();
    for a in 0..n {
        for b in 0..n {
            if !inv[a * n + b].is_zero_literal() {
                gradient_norm = gradient_norm.add(&inv[a * n + b].mul(&df[a]).mul(&df[b]));
            }
        }
    }
    Ok(ExtensionResiduals { hessian, ricci, gradient_norm })
}

/// `H_g Ψ + ρ_g − μ dΨ⊗dΨ − λ g`.
pub fn quasi_einstein_residual(g: &PseudoMetric, psi: &Expr, mu: &Rational, lambda: &Rational) -> Result<TensorField> {
    let n = g.dim();
    let lc = levi_civita(g)?;
    let dpsi = psi.gradient(n);
    let lhs = lc.connection.hessian(psi).add(&lc.connection.ricci().rho);
    Ok(lhs.map(|x, e| e.sub(&dpsi[x[0]].mul(&dpsi[x[1]]).scale(mu)).sub(&g.get(x[0], x[1]).scale(lambda))))
}

/// For `f ∈ E(μ_aff, ∇)`, the potential `ψ = −(2/μ_aff) log f` and the
/// quasi-Einstein constant `μ = μ_aff/2` with `H ψ + 2ρ_s − μ dψ⊗dψ = 0`.
pub fn qe_potential(f: &Expr, mu_affine: &Rational) -> Result<(Expr, Rational)> {
    if num_traits::Zero::is_zero(mu_affine) {
        return Err(Error::Precondition("the potential needs a nonzero eigenvalue".into()));
    }
    let c = -Rational::from_integer(2.into()) / mu_affine;
    Ok((Expr::log(f).scale(&c), mu_affine / Rational::from_integer(2.into())))
}

/// Base-side form of the extension's quasi-Einstein equation:
/// `H_∇ψ + 2ρ_s − μ dψ⊗dψ`.
pub fn affine_qe_residual(manifold: &AffineManifold, psi: &Expr, mu: &Rational) -> TensorField {
    let m = manifold.dim();
    let dpsi = psi.gradient(m);
    let rho2 = manifold.ricci().sym.scale(&Expr::int(2));
    manifold.hessian(psi).add(&rho2).map(|x, e| e.sub(&dpsi[x[0]].mul(&dpsi[x[1]]).scale(mu)))
}
