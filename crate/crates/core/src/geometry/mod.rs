//! Affine manifolds given by Christoffel symbols in a single chart, and the
//! tensor calculus built on them.
//!
//! Conventions: `R_ijk^l = ∂_iΓ_jk^l − ∂_jΓ_ik^l + Γ_in^lΓ_jk^n − Γ_jn^lΓ_ik^n`,
//! and the Ricci tensor traces the first lower slot, `ρ_jk = R_ijk^i`.

mod document;
mod tensor;

use rand::Rng;

use crate::expr::{EvalPoint, Expr, Rational, ZeroTest};
use crate::sample::{random_rational, FLOAT_BOX, MAX_SAMPLE_TRIES};
use crate::verdict::Verdict;
use crate::{Error, Result};

pub use document::ManifoldDoc;
pub use tensor::{TensorField, Valence};

/// A torsion-free connection on a coordinate chart.
#[derive(Clone, Debug)]
pub struct AffineManifold {
    coords: Vec<String>,
    gamma: Vec<Expr>,
    excluded: Vec<Expr>,
}

pub fn default_coords(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("x{i}")).collect()
}

impl AffineManifold {
    /// Build from a generator of `Γ_ij^k` (0-based). Only `i <= j` is queried;
    /// the grid is filled symmetrically.
    pub fn from_fn(m: usize, gamma: impl FnMut(usize, usize, usize) -> Expr) -> Result<Self> {
        Self::from_fn_with(default_coords(m), Vec::new(), gamma)
    }

    pub fn from_fn_with(
        coords: Vec<String>,
        excluded: Vec<Expr>,
        mut gamma: impl FnMut(usize, usize, usize) -> Expr,
    ) -> Result<Self> {
        let m = coords.len();
        if m < 2 {
            return Err(Error::BadDimension(format!("dimension must be at least 2, got {m}")));
        }
        let mut grid = vec![Expr::zero(); m * m * m];
        for i in 0..m {
            for j in i..m {
                for k in 0..m {
                    let e = gamma(i, j, k);
                    grid[(i * m + j) * m + k] = e.clone();
                    grid[(j * m + i) * m + k] = e;
                }
            }
        }
        Self::new(coords, grid, excluded)
    }

    /// Build from a full grid indexed `[(i*m + j)*m + k]`; symmetry in `i,j` is verified.
    pub fn new(coords: Vec<String>, gamma: Vec<Expr>, excluded: Vec<Expr>) -> Result<Self> {
        let m = coords.len();
        if m < 2 {
            return Err(Error::BadDimension(format!("dimension must be at least 2, got {m}")));
        }
        if gamma.len() != m * m * m {
            return Err(Error::BadDimension(format!(
                "expected {} Christoffel symbols, got {}",
                m * m * m,
                gamma.len()
            )));
        }
        for e in gamma.iter().chain(&excluded) {
            if e.max_coord().is_some_and(|c| c >= m) {
                return Err(Error::BadDimension(format!("expression `{e}` uses a coordinate beyond x{m}")));
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                for k in 0..m {
                    let a = &gamma[(i * m + j) * m + k];
                    let b = &gamma[(j * m + i) * m + k];
                    if a.sub(b).zero_test() == ZeroTest::Nonzero {
                        return Err(Error::Asymmetric { i: i + 1, j: j + 1, k: k + 1 });
                    }
                }
            }
        }
        Ok(Self { coords, gamma, excluded })
    }

    pub fn flat(m: usize) -> Self {
        Self::from_fn(m, |_, _, _| Expr::zero()).expect("flat connection is valid")
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn excluded(&self) -> &[Expr] {
        &self.excluded
    }

    /// `Γ_ij^k`, 0-based.
    pub fn gamma(&self, i: usize, j: usize, k: usize) -> &Expr {
        let m = self.dim();
        &self.gamma[(i * m + j) * m + k]
    }

    /// The Christoffel symbols as a (2,1) tensor grid.
    pub fn christoffel(&self) -> TensorField {
        TensorField::from_fn(self.dim(), Valence::mixed(2, 1), |x| self.gamma(x[0], x[1], x[2]).clone())
    }

    pub fn with_excluded(mut self, extra: Vec<Expr>) -> Self {
        self.excluded.extend(extra);
        self
    }

    /// True when every Christoffel symbol is free of exp/log.
    pub fn is_rational(&self) -> bool {
        self.gamma.iter().all(Expr::is_rational)
    }

    /// Verify that `p` has the right arity, avoids the excluded locus, and
    /// that every Christoffel symbol is defined there.
    pub fn check_point(&self, p: &EvalPoint) -> Result<()> {
        let m = self.dim();
        if p.len() != m {
            return Err(Error::PointDimension { expected: m, got: p.len() });
        }
        let defined = |e: &Expr, nonzero: bool| -> Result<()> {
            let v = match p {
                EvalPoint::Exact(x) if e.is_rational() => {
                    let v = e.eval_exact(x).map_err(map_locus)?;
                    !num_traits::Zero::is_zero(&v)
                }
                _ => {
                    let v = e.eval_float(&p.to_f64()).map_err(map_locus)?;
                    v.abs() > 1e-12
                }
            };
            if nonzero && !v {
                return Err(Error::OnExcludedLocus);
            }
            Ok(())
        };
        for e in &self.excluded {
            defined(e, true)?;
        }
        for e in &self.gamma {
            defined(e, false)?;
        }
        Ok(())
    }

    /// A random rational point off the excluded locus.
    pub fn random_exact_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<Rational>> {
        for _ in 0..MAX_SAMPLE_TRIES {
            let p: Vec<Rational> = (0..self.dim()).map(|_| random_rational(rng)).collect();
            if self.check_point(&EvalPoint::Exact(p.clone())).is_ok() {
                return Ok(p);
            }
        }
        Err(Error::Sampling(format!("no admissible rational point after {MAX_SAMPLE_TRIES} tries")))
    }

    /// A random float point in the sampling box, off the excluded locus.
    pub fn random_float_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        for _ in 0..MAX_SAMPLE_TRIES {
            let p: Vec<f64> = (0..self.dim()).map(|_| rng.gen_range(FLOAT_BOX.0..FLOAT_BOX.1)).collect();
            if self.check_point(&EvalPoint::Float(p.clone())).is_ok() {
                return Ok(p);
            }
        }
        Err(Error::Sampling(format!("no admissible float point after {MAX_SAMPLE_TRIES} tries")))
    }

    /// Curvature `R_ijk^l` as a (3,1) tensor.
    pub fn curvature(&self) -> TensorField {
        let m = self.dim();
        TensorField::from_fn(m, Valence::mixed(3, 1), |x| {
            let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
            if i == j {
                return Expr::zero();
            }
            let mut r = self.gamma(j, k, l).diff(i).sub(&self.gamma(i, k, l).diff(j));
            for n in 0..m {
                r = r
                    .add(&self.gamma(i, n, l).mul(self.gamma(j, k, n)))
                    .sub(&self.gamma(j, n, l).mul(self.gamma(i, k, n)));
            }
            r
        })
    }

    /// Ricci tensor and its symmetric and antisymmetric parts.
    pub fn ricci(&self) -> RicciParts {
        let m = self.dim();
        let curv = self.curvature();
        let rho = TensorField::from_fn(m, Valence::covariant(2), |x| {
            (0..m).fold(Expr::zero(), |acc, i| acc.add(curv.get(&[i, x[0], x[1], i])))
        });
        RicciParts::split(rho)
    }

    /// Hessian `H_ij = ∂_i∂_j f − Γ_ij^k ∂_k f`.
    pub fn hessian(&self, f: &Expr) -> TensorField {
        let m = self.dim();
        let df = f.gradient(m);
        let ddf: Vec<Vec<Expr>> = df.iter().map(|d| d.gradient(m)).collect();
        TensorField::from_fn(m, Valence::covariant(2), |x| {
            let (i, j) = (x[0], x[1]);
            (0..m).fold(ddf[i][j].clone(), |acc, k| acc.sub(&self.gamma(i, j, k).mul(&df[k])))
        })
    }

    /// Covariant derivative of a (0,2) tensor: `(∇T)_{i;jk} = ∂_iT_jk − Γ_ij^l T_lk − Γ_ik^l T_jl`.
    pub fn covariant_derivative(&self, t: &TensorField) -> TensorField {
        assert_eq!(t.valence(), Valence::covariant(2), "covariant_derivative expects a (0,2) tensor");
        let m = self.dim();
        TensorField::from_fn(m, Valence::covariant(3), |x| {
            let (i, j, k) = (x[0], x[1], x[2]);
            let mut r = t.get(&[j, k]).diff(i);
            for l in 0..m {
                r = r.sub(&self.gamma(i, j, l).mul(t.get(&[l, k]))).sub(&self.gamma(i, k, l).mul(t.get(&[j, l])));
            }
            r
        })
    }

    /// `∇ρ` as a (0,3) tensor with the differentiation slot first.
    pub fn nabla_ricci(&self) -> TensorField {
        self.covariant_derivative(&self.ricci().rho)
    }

    /// `Q_μ f = H f − μ f ρ_s`.
    pub fn apply_qe_operator(&self, mu: &Rational, f: &Expr) -> TensorField {
        let rho_s = self.ricci().sym;
        let coeff = f.scale(mu);
        self.hessian(f).sub(&rho_s.scale(&coeff))
    }

    /// Residuals of the affine Killing equation for the vector field `x`,
    /// as a (2,1) tensor.
    pub fn killing_residual(&self, x: &[Expr]) -> Result<TensorField> {
        let m = self.dim();
        if x.len() != m {
            return Err(Error::BadDimension(format!("vector field has {} components, expected {m}", x.len())));
        }
        let dx: Vec<Vec<Expr>> = x.iter().map(|c| c.gradient(m)).collect();
        Ok(TensorField::from_fn(m, Valence::mixed(2, 1), |idx| {
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            let mut r = dx[k][i].diff(j);
            for l in 0..m {
                r = r
                    .add(&x[l].mul(&self.gamma(i, j, k).diff(l)))
                    .add(&dx[l][i].mul(self.gamma(l, j, k)))
                    .add(&dx[l][j].mul(self.gamma(i, l, k)))
                    .sub(&dx[k][l].mul(self.gamma(i, j, l)));
            }
            r
        }))
    }

    pub fn is_affine_killing(&self, x: &[Expr]) -> Result<Verdict> {
        Ok(self.killing_residual(x)?.is_zero())
    }

    /// Whether all curvature components vanish identically.
    pub fn is_flat(&self) -> Verdict {
        self.curvature().is_zero()
    }
}

fn map_locus(e: Error) -> Error {
    match e {
        Error::DivisionByZero | Error::NonFinite => Error::OnExcludedLocus,
        other => other,
    }
}

/// `ρ = ρ_s + ρ_a`.
#[derive(Clone, Debug)]
pub struct RicciParts {
    pub rho: TensorField,
    pub sym: TensorField,
    pub alt: TensorField,
}

impl RicciParts {
    pub fn split(rho: TensorField) -> Self {
        let half = Expr::constant(crate::expr::rational(1, 2));
        let sym = rho.map(|x, e| e.add(rho.get(&[x[1], x[0]])).mul(&half));
        let alt = rho.map(|x, e| e.sub(rho.get(&[x[1], x[0]])).mul(&half));
        Self { rho, sym, alt }
    }
}

/// Exact rank of a (0,2) tensor at a rational point.
pub fn rank_at(t: &TensorField, p: &[Rational]) -> Result<usize> {
    let m = t.dim();
    let rows = (0..m)
        .map(|i| (0..m).map(|j| t.get(&[i, j]).eval_exact(p)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(crate::linalg::rank_fraction_free(&rows))
}
