//! Numerical transport of jets along polylines by fixed-step RK4.

use super::JetSystem;
use crate::expr::{CompiledExpr, Rational};
use crate::geometry::AffineManifold;
use crate::{Error, Result};

/// RK4 steps per polyline segment.
pub const DEFAULT_STEPS: usize = 1000;

/// Excluded-locus values below this magnitude count as a crossing.
const LOCUS_EPS: f64 = 1e-12;

/// The matrices `A_i` compiled for float evaluation; zero entries are skipped.
#[derive(Clone, Debug)]
pub struct CompiledJetSystem {
    m: usize,
    entries: Vec<Vec<(usize, usize, CompiledExpr)>>,
    excluded: Vec<CompiledExpr>,
}

impl CompiledJetSystem {
    pub fn new(system: &JetSystem) -> Self {
        let m = system.dim();
        let entries = (0..m)
            .map(|i| {
                let mut v = Vec::new();
                for r in 0..=m {
                    for c in 0..=m {
                        let e = system.entry(i, r, c);
                        if !e.is_zero_literal() {
                            v.push((r, c, CompiledExpr::new(e)));
                        }
                    }
                }
                v
            })
            .collect();
        let excluded = system.excluded().iter().map(CompiledExpr::new).collect();
        Self { m, entries, excluded }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if self.excluded.iter().any(|e| {
            let v = e.eval(x).abs();
            v.is_nan() || v <= LOCUS_EPS
        }) {
            return Err(Error::OnExcludedLocus);
        }
        Ok(())
    }

    /// `du/dt = Σ_i v^i A_i(x) u`.
    fn rhs(&self, x: &[f64], v: &[f64], u: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        let mut out = vec![0.0; self.m + 1];
        for (i, vi) in v.iter().enumerate() {
            if *vi == 0.0 {
                continue;
            }
            for (r, c, e) in &self.entries[i] {
                out[*r] += vi * e.eval(x) * u[*c];
            }
        }
        if out.iter().all(|y| y.is_finite()) {
            Ok(out)
        } else {
            Err(Error::NonFinite)
        }
    }

    /// Transport `u0` along the polyline `path` with `steps` RK4 steps per segment.
    pub fn transport(&self, path: &[Vec<f64>], u0: &[f64], steps: usize) -> Result<Vec<f64>> {
        let n = self.m + 1;
        if u0.len() != n {
            return Err(Error::BadDimension(format!("jet has {} entries, expected {n}", u0.len())));
        }
        if let Some(bad) = path.iter().find(|p| p.len() != self.m) {
            return Err(Error::PointDimension { expected: self.m, got: bad.len() });
        }
        let Some(start) = path.first() else {
            return Err(Error::Precondition("empty path".into()));
        };
        self.check(start)?;
        let steps = steps.max(1);
        let mut u = u0.to_vec();
        for seg in path.windows(2) {
            let (a, b) = (&seg[0], &seg[1]);
            let v: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
            let h = 1.0 / steps as f64;
            let at = |t: f64| -> Vec<f64> { a.iter().zip(&v).map(|(x, d)| x + t * d).collect() };
            let axpy = |u: &[f64], k: &[f64], s: f64| -> Vec<f64> { u.iter().zip(k).map(|(x, y)| x + s * y).collect() };
            for s in 0..steps {
                let t = s as f64 * h;
                let k1 = self.rhs(&at(t), &v, &u)?;
                let k2 = self.rhs(&at(t + h / 2.0), &v, &axpy(&u, &k1, h / 2.0))?;
                let k3 = self.rhs(&at(t + h / 2.0), &v, &axpy(&u, &k2, h / 2.0))?;
                let k4 = self.rhs(&at(t + h), &v, &axpy(&u, &k3, h))?;
                for j in 0..n {
                    u[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
                }
            }
            self.check(b)?;
        }
        Ok(u)
    }

    /// `‖transport(u0) − u0‖` around a closed polyline.
    pub fn holonomy_defect(&self, closed: &[Vec<f64>], u0: &[f64], steps: usize) -> Result<f64> {
        match (closed.first(), closed.last()) {
            (Some(a), Some(b)) if closed.len() >= 2 && a == b => {}
            _ => return Err(Error::Precondition("loop must start and end at the same point".into())),
        }
        let u = self.transport(closed, u0, steps)?;
        Ok(u.iter().zip(u0).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
    }
}

pub fn transport_jet(manifold: &AffineManifold, mu: &Rational, path: &[Vec<f64>], u0: &[f64]) -> Result<Vec<f64>> {
    CompiledJetSystem::new(&JetSystem::new(manifold, mu)).transport(path, u0, DEFAULT_STEPS)
}

pub fn holonomy_defect(manifold: &AffineManifold, mu: &Rational, closed: &[Vec<f64>], u0: &[f64]) -> Result<f64> {
    CompiledJetSystem::new(&JetSystem::new(manifold, mu)).holonomy_defect(closed, u0, DEFAULT_STEPS)
}
