use std::collections::BTreeMap;

use crate::expr::{Expr, ZeroTest};
use crate::verdict::Verdict;
use crate::{Error, Result};

/// Index structure of a tensor field: `covariant` lower slots followed by
/// `contravariant` upper slots (0 or 1 in practice).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Valence {
    pub covariant: usize,
    pub contravariant: usize,
}

impl Valence {
    pub const fn covariant(r: usize) -> Self {
        Self { covariant: r, contravariant: 0 }
    }

    pub const fn mixed(covariant: usize, contravariant: usize) -> Self {
        Self { covariant, contravariant }
    }

    pub fn rank(self) -> usize {
        self.covariant + self.contravariant
    }
}

/// Dense grid of component expressions, indexed lower slots first.
#[derive(Clone, Debug)]
pub struct TensorField {
    dim: usize,
    valence: Valence,
    comps: Vec<Expr>,
}

fn unflatten(mut flat: usize, dim: usize, rank: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for slot in (0..rank).rev() {
        idx[slot] = flat % dim;
        flat /= dim;
    }
    idx
}

impl TensorField {
    pub fn from_fn(dim: usize, valence: Valence, mut f: impl FnMut(&[usize]) -> Expr) -> Self {
        let rank = valence.rank();
        let n = dim.pow(rank as u32);
        let comps = (0..n).map(|flat| f(&unflatten(flat, dim, rank))).collect();
        Self { dim, valence, comps }
    }

    pub fn zero(dim: usize, valence: Valence) -> Self {
        Self::from_fn(dim, valence, |_| Expr::zero())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn valence(&self) -> Valence {
        self.valence
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.valence.rank(), "index arity");
        idx.iter().fold(0, |acc, &i| {
            assert!(i < self.dim, "index {i} out of range");
            acc * self.dim + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> &Expr {
        &self.comps[self.offset(idx)]
    }

    /// All components with their indices, in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &Expr)> {
        let (dim, rank) = (self.dim, self.valence.rank());
        self.comps.iter().enumerate().map(move |(flat, e)| (unflatten(flat, dim, rank), e))
    }

    pub fn map(&self, f: impl Fn(&[usize], &Expr) -> Expr) -> Self {
        Self::from_fn(self.dim, self.valence, |idx| f(idx, self.get(idx)))
    }

    fn check_shape(&self, other: &Self) {
        assert!(self.dim == other.dim && self.valence == other.valence, "tensor shape mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_shape(other);
        self.map(|idx, e| e.add(other.get(idx)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_shape(other);
        self.map(|idx, e| e.sub(other.get(idx)))
    }

    pub fn scale(&self, k: &Expr) -> Self {
        self.map(|_, e| e.mul(k))
    }

    /// Whether every component vanishes identically.
    pub fn is_zero(&self) -> Verdict {
        Verdict::all(self.comps.iter().map(|e| Verdict::from(e.zero_test())))
    }

    /// Per-component zero tests, used by reports.
    pub fn zero_tests(&self) -> Vec<ZeroTest> {
        self.comps.iter().map(Expr::zero_test).collect()
    }

    /// True iff some component is not literally the zero constant.
    pub fn has_nonzero_literal(&self) -> bool {
        self.comps.iter().any(|e| !e.is_zero_literal())
    }

    /// Invariance under swapping every pair of covariant slots.
    pub fn is_totally_symmetric(&self) -> Result<Verdict> {
        if self.valence.contravariant != 0 || !(2..=3).contains(&self.valence.covariant) {
            return Err(Error::Precondition("total symmetry needs a (0,2) or (0,3) tensor".into()));
        }
        let r = self.valence.covariant;
        let mut acc = Verdict::Holds;
        for (idx, e) in self.iter() {
            for a in 0..r {
                for b in a + 1..r {
                    if idx[a] >= idx[b] {
                        continue;
                    }
                    let mut swapped = idx.clone();
                    swapped.swap(a, b);
                    acc = acc.and(e.sub(self.get(&swapped)).zero_test().into());
                    if acc == Verdict::Fails {
                        return Ok(acc);
                    }
                }
            }
        }
        Ok(acc)
    }

    /// Float values of all components at `p`, in [`Self::iter`] order.
    pub fn eval_float(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.comps.iter().map(|e| e.eval_float(p)).collect()
    }

    /// Largest absolute component value at `p`.
    pub fn max_abs_at(&self, p: &[f64]) -> Result<f64> {
        Ok(self.eval_float(p)?.into_iter().fold(0.0, |m, v| m.max(v.abs())))
    }

    /// Nonzero components keyed `"i,j"` (1-based, contravariant slot after `^`).
    pub fn to_map(&self, names: &[String]) -> BTreeMap<String, String> {
        let lower = self.valence.covariant;
        self.iter()
            .filter(|(_, e)| !e.is_zero_literal())
            .map(|(idx, e)| {
                let mut key: String = idx[..lower].iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
                for u in &idx[lower..] {
                    key.push_str(&format!("^{}", u + 1));
                }
                (key, e.display_with(names).to_string())
            })
            .collect()
    }
}
