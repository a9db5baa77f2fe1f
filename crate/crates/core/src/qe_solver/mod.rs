//! The quasi-Einstein equation `H f = μ f ρ_s` as a first-order system on
//! jets `u = (f, ∂_1 f, …, ∂_m f)`, `∂_i u = A_i u`, and the dimension of its
//! local solution space by integrability and prolongation.

mod transport;

use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::expr::{format_rational, EvalPoint, Expr, Rational};
use crate::geometry::AffineManifold;
use crate::linalg::{kernel_basis, kernel_svd, rank_fraction_free, rank_svd, EchelonBasis};
use crate::Result;

pub use transport::{holonomy_defect, transport_jet, CompiledJetSystem, DEFAULT_STEPS};

const SOLVER_SEED: u64 = 0x0051_AB1E;

/// `μ_m = −1/(m−1)`.
pub fn distinguished_eigenvalue(m: usize) -> Rational {
    Rational::new((-1).into(), (m as i64 - 1).into())
}

/// Coefficient matrices `A_i` of the jet system.
#[derive(Clone, Debug)]
pub struct JetSystem {
    m: usize,
    mu: Rational,
    a: Vec<Vec<Vec<Expr>>>,
    excluded: Vec<Expr>,
}

impl JetSystem {
    pub fn new(manifold: &AffineManifold, mu: &Rational) -> Self {
        let m = manifold.dim();
        let rho_s = manifold.ricci().sym;
        let a = (0..m)
            .map(|i| {
                (0..=m)
                    .map(|r| {
                        (0..=m)
                            .map(|c| match (r, c) {
                                (0, c) if c == i + 1 => Expr::one(),
                                (0, _) => Expr::zero(),
                                (j, 0) => rho_s.get(&[i, j - 1]).scale(mu),
                                (j, k) => manifold.gamma(i, j - 1, k - 1).clone(),
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self { m, mu: mu.clone(), a, excluded: manifold.excluded().to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn mu(&self) -> &Rational {
        &self.mu
    }

    /// The distinguished eigenvalue for this dimension.
    pub fn mu_m(&self) -> Rational {
        distinguished_eigenvalue(self.m)
    }

    /// Entry `(r, c)` of `A_i`.
    pub fn entry(&self, i: usize, r: usize, c: usize) -> &Expr {
        &self.a[i][r][c]
    }

    pub fn excluded(&self) -> &[Expr] {
        &self.excluded
    }

    pub fn is_rational(&self) -> bool {
        self.a.iter().flatten().flatten().all(Expr::is_rational)
    }

    /// `c·A_i`, the algebraic part of prolonging row `c` in direction `i`.
    fn row_times(&self, c: &[Expr], i: usize) -> Vec<Expr> {
        (0..=self.m)
            .map(|col| {
                c.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero_literal())
                    .fold(Expr::zero(), |acc, (r, x)| acc.add(&x.mul(&self.a[i][r][col])))
            })
            .collect()
    }

    /// Derivative of a constraint row along direction `i`: `∂_i c + c·A_i`.
    pub fn prolong_row(&self, c: &[Expr], i: usize) -> Vec<Expr> {
        self.row_times(c, i).into_iter().zip(c).map(|(x, ci)| x.add(&ci.diff(i))).collect()
    }

    /// The matrix `F_ij = ∂_iA_j − ∂_jA_i + A_jA_i − A_iA_j`.
    pub fn curvature_matrix(&self, i: usize, j: usize) -> Vec<Vec<Expr>> {
        let n = self.m + 1;
        let prod = |x: usize, y: usize, r: usize, c: usize| {
            (0..n).fold(Expr::zero(), |acc, k| {
                let (p, q) = (&self.a[x][r][k], &self.a[y][k][c]);
                if p.is_zero_literal() || q.is_zero_literal() {
                    acc
                } else {
                    acc.add(&p.mul(q))
                }
            })
        };
        (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        self.a[j][r][c]
                            .diff(i)
                            .sub(&self.a[i][r][c].diff(j))
                            .add(&prod(j, i, r, c))
                            .sub(&prod(i, j, r, c))
                    })
                    .collect()
            })
            .collect()
    }
}

pub fn build_jet_system(manifold: &AffineManifold, mu: &Rational) -> JetSystem {
    JetSystem::new(manifold, mu)
}

/// Rows `c` with `c·u = 0` for every solution jet `u`.
#[derive(Clone, Debug, Default)]
pub struct ConstraintStack {
    pub rows: Vec<Vec<Expr>>,
    pub generation: Vec<usize>,
}

impl ConstraintStack {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Exact rank of the stack at a rational point.
    pub fn rank_at(&self, p: &[Rational]) -> Result<usize> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|e| e.eval_exact(p)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(rank_fraction_free(&rows))
    }
}

/// All rows of `F_ij` for `i < j`.
pub fn integrability_constraints(j: &JetSystem) -> ConstraintStack {
    let mut stack = ConstraintStack::default();
    for a in 0..j.m {
        for b in a + 1..j.m {
            for row in j.curvature_matrix(a, b) {
                stack.rows.push(row);
                stack.generation.push(0);
            }
        }
    }
    stack
}

/// Append `∂_i c + c·A_i` for every row `c` of the latest generation and every direction `i`.
pub fn prolong(j: &JetSystem, c: &ConstraintStack) -> ConstraintStack {
    let mut out = c.clone();
    let Some(&last) = c.generation.iter().max() else {
        return out;
    };
    for (row, &g) in c.rows.iter().zip(&c.generation) {
        if g != last {
            continue;
        }
        for i in 0..j.m {
            out.rows.push(j.prolong_row(row, i));
            out.generation.push(last + 1);
        }
    }
    out
}

/// Initial jets spanning the solution space at the basepoint.
#[derive(Clone, Debug, PartialEq)]
pub enum JetBasis {
    Exact(Vec<Vec<Rational>>),
    Float(Vec<Vec<f64>>),
}

impl JetBasis {
    pub fn len(&self) -> usize {
        match self {
            Self::Exact(v) => v.len(),
            Self::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        match self {
            Self::Exact(v) => v.iter().map(|j| j.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()).collect(),
            Self::Float(v) => v.clone(),
        }
    }
}

/// `E(P, μ, ∇)` described by its initial jets at `P`.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    pub basepoint: EvalPoint,
    pub mu: Rational,
    pub dim: usize,
    pub basis: JetBasis,
    /// Rank of the accumulated constraints at `P` after each generation.
    pub rank_history: Vec<usize>,
    pub stabilized: bool,
}

#[derive(Serialize)]
struct Report<'a> {
    mu: String,
    basepoint: Vec<serde_json::Value>,
    dim: usize,
    rank_history: &'a [usize],
    stabilized: bool,
    basis_jets: Vec<Vec<serde_json::Value>>,
}

fn float_json(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

impl SolutionSpace {
    pub fn report_json(&self) -> serde_json::Value {
        let rat = |x: &Rational| serde_json::Value::String(format_rational(x));
        let basepoint = match &self.basepoint {
            EvalPoint::Exact(v) => v.iter().map(rat).collect(),
            EvalPoint::Float(v) => v.iter().copied().map(float_json).collect(),
        };
        let basis_jets = match &self.basis {
            JetBasis::Exact(v) => v.iter().map(|j| j.iter().map(rat).collect()).collect(),
            JetBasis::Float(v) => v.iter().map(|j| j.iter().copied().map(float_json).collect()).collect(),
        };
        let r = Report {
            mu: format_rational(&self.mu),
            basepoint,
            dim: self.dim,
            rank_history: &self.rank_history,
            stabilized: self.stabilized,
            basis_jets,
        };
        serde_json::to_value(r).expect("report serializes")
    }

    /// Basis with `Θ(φ_i) = e_i`, available when the space is the full jet space.
    pub fn unit_jets(&self) -> Option<Vec<Vec<f64>>> {
        let n = self.basepoint.len() + 1;
        (self.dim == n).then(|| (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect())
    }
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Maximum number of prolongation generations; `None` means `2m + 6`.
    pub depth_cap: Option<usize>,
    /// Seed for the auxiliary generic point.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { depth_cap: None, seed: SOLVER_SEED }
    }
}

pub fn solution_dimension(manifold: &AffineManifold, mu: &Rational, p: &EvalPoint) -> Result<SolutionSpace> {
    solution_dimension_with(manifold, mu, p, &SolverOptions::default())
}

/// Row spaces at the basepoint and at an auxiliary generic point.
enum Tracker {
    Exact { p: Vec<Rational>, q: Vec<Rational>, at_p: EchelonBasis, at_q: EchelonBasis, rows_p: Vec<Vec<Rational>> },
    Float { n: usize, p: Vec<f64>, q: Vec<f64>, rows_p: Vec<Vec<f64>>, rows_q: Vec<Vec<f64>> },
}

fn push_if_independent(rows: &mut Vec<Vec<f64>>, v: Vec<f64>, n: usize) -> bool {
    if v.iter().all(|x| *x == 0.0) {
        return false;
    }
    let before = rank_svd(rows, n);
    rows.push(v);
    if rank_svd(rows, n) > before {
        true
    } else {
        rows.pop();
        false
    }
}

impl Tracker {
    /// Insert a symbolic row; returns whether it enlarged the row space at P or at Q.
    fn insert(&mut self, row: &[Expr]) -> Result<bool> {
        match self {
            Self::Exact { p, q, at_p, at_q, rows_p } => {
                let vp = row.iter().map(|e| e.eval_exact(p)).collect::<Result<Vec<_>>>()?;
                let vq = row.iter().map(|e| e.eval_exact(q)).collect::<Result<Vec<_>>>()?;
                let gp = at_p.insert(&vp);
                if gp {
                    rows_p.push(vp);
                }
                Ok(at_q.insert(&vq) || gp)
            }
            Self::Float { n, p, q, rows_p, rows_q } => {
                let vp = row.iter().map(|e| e.eval_float(p)).collect::<Result<Vec<_>>>()?;
                let vq = row.iter().map(|e| e.eval_float(q)).collect::<Result<Vec<_>>>()?;
                let gp = push_if_independent(rows_p, vp, *n);
                Ok(push_if_independent(rows_q, vq, *n) || gp)
            }
        }
    }

    fn rank_p(&self) -> usize {
        match self {
            Self::Exact { at_p, .. } => at_p.rank(),
            Self::Float { rows_p, .. } => rows_p.len(),
        }
    }

    fn basis(&self, n: usize) -> JetBasis {
        match self {
            Self::Exact { rows_p, .. } => {
                debug_assert_eq!(rank_fraction_free(rows_p), rows_p.len());
                JetBasis::Exact(kernel_basis(rows_p, n))
            }
            Self::Float { rows_p, .. } => JetBasis::Float(kernel_svd(rows_p, n)),
        }
    }
}

/// Compute `dim E(P, μ, ∇)` and a basis of admissible initial jets.
///
/// Constraint rows are generated from the integrability matrices and then
/// prolonged. A row is kept for further prolongation only if it enlarges the
/// row space at `P` or at an auxiliary random point; rows dependent at the
/// random point are, with probability one, combinations of kept rows with
/// rational-function coefficients, so their prolongations add nothing new.
/// The loop ends when a generation keeps no rows, when the rank at `P` is
/// `m+1`, or at the depth cap (reported as unstabilized).
pub fn solution_dimension_with(
    manifold: &AffineManifold,
    mu: &Rational,
    p: &EvalPoint,
    opts: &SolverOptions,
) -> Result<SolutionSpace> {
    manifold.check_point(p)?;
    let m = manifold.dim();
    let n = m + 1;
    let system = JetSystem::new(manifold, mu);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let exact = system.is_rational() && matches!(p, EvalPoint::Exact(_));
    let mut tracker = match p {
        EvalPoint::Exact(pv) if exact => Tracker::Exact {
            p: pv.clone(),
            q: manifold.random_exact_point(&mut rng)?,
            at_p: EchelonBasis::new(),
            at_q: EchelonBasis::new(),
            rows_p: Vec::new(),
        },
        _ => Tracker::Float {
            n,
            p: p.to_f64(),
            q: manifold.random_float_point(&mut rng)?,
            rows_p: Vec::new(),
            rows_q: Vec::new(),
        },
    };

    let depth_cap = opts.depth_cap.unwrap_or(2 * m + 6);
    let mut rank_history = Vec::new();
    let mut frontier: Vec<Vec<Expr>> = Vec::new();
    for row in integrability_constraints(&system).rows {
        if row.iter().all(Expr::is_zero_literal) {
            continue;
        }
        if tracker.insert(&row)? {
            frontier.push(row);
        }
    }
    rank_history.push(tracker.rank_p());
    let mut stabilized = frontier.is_empty() || tracker.rank_p() == n;
    let mut generation = 0;
    while !stabilized && generation < depth_cap {
        generation += 1;
        let mut next = Vec::new();
        for row in &frontier {
            for i in 0..m {
                let new = system.prolong_row(row, i);
                if new.iter().all(Expr::is_zero_literal) {
                    continue;
                }
                if tracker.insert(&new)? {
                    next.push(new);
                }
            }
        }
        frontier = next;
        rank_history.push(tracker.rank_p());
        stabilized = frontier.is_empty() || tracker.rank_p() == n;
    }

    let rank = tracker.rank_p();
    let basis = tracker.basis(n);
    Ok(SolutionSpace { basepoint: p.clone(), mu: mu.clone(), dim: n - rank, basis, rank_history, stabilized })
}
