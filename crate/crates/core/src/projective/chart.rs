//! Flat coordinates `z^i = φ_i/φ_0` of a strongly projectively flat
//! connection, and a numeric check that geodesics map to straight lines.

use rand::Rng;
use serde::Serialize;

use super::strong_flatness_test;
use crate::expr::{CompiledExpr, EvalPoint};
use crate::geometry::AffineManifold;
use crate::par::Execution;
use crate::qe_solver::{distinguished_eigenvalue, CompiledJetSystem, JetSystem, DEFAULT_STEPS};
use crate::{Error, Result};

/// Points sampled along each geodesic.
pub const GEODESIC_SAMPLES: usize = 12;
const GEODESIC_STEPS: usize = 400;
const PHI0_MIN: f64 = 1e-8;

/// Radius of the sampled region around `p`: a quarter of the estimated
/// distance to the excluded locus (probed along axis and diagonal rays),
/// or `1/4` when nothing is excluded nearby.
pub fn default_radius(manifold: &AffineManifold, p: &[f64]) -> f64 {
    const MAX: f64 = 1.0;
    const PROBES: usize = 256;
    let m = p.len();
    let excluded: Vec<CompiledExpr> = manifold.excluded().iter().map(CompiledExpr::new).collect();
    if excluded.is_empty() {
        return MAX / 4.0;
    }
    let signs: Vec<f64> = excluded.iter().map(|e| e.eval(p).signum()).collect();
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..m {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; m];
            d[i] = s;
            dirs.push(d);
        }
        for j in i + 1..m {
            for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut d = vec![0.0; m];
                d[i] = a / 2f64.sqrt();
                d[j] = b / 2f64.sqrt();
                dirs.push(d);
            }
        }
    }
    let mut dist = MAX;
    for d in &dirs {
        for k in 1..=PROBES {
            let r = MAX * k as f64 / PROBES as f64;
            if r >= dist {
                break;
            }
            let x: Vec<f64> = p.iter().zip(d).map(|(a, b)| a + r * b).collect();
            let crossed = excluded.iter().zip(&signs).any(|(e, s)| {
                let v = e.eval(&x);
                !v.is_finite() || v.abs() < 1e-12 || v.signum() != *s
            });
            if crossed {
                dist = r;
                break;
            }
        }
    }
    dist / 4.0
}

/// Lattice with `per_axis` points per coordinate on the cube of half-width `radius`.
pub fn grid_around(p: &[f64], radius: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let per_axis = per_axis.max(1);
    let offsets: Vec<f64> = if per_axis == 1 {
        vec![0.0]
    } else {
        (0..per_axis).map(|k| -radius + 2.0 * radius * k as f64 / (per_axis - 1) as f64).collect()
    };
    let mut out = vec![Vec::new()];
    for c in p {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<f64>| {
                offsets.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(c + o);
                    v
                })
            })
            .collect();
    }
    out
}

/// Chart built from the solutions `φ_i` with initial jets `e_i` at `P`.
#[derive(Clone, Debug)]
pub struct FlatChart {
    basepoint: Vec<f64>,
    system: CompiledJetSystem,
    radius: f64,
    pub points: Vec<Vec<f64>>,
    pub z: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct ChartJson<'a> {
    points: &'a [Vec<f64>],
    z: &'a [Vec<f64>],
}

impl FlatChart {
    /// Fails unless `dim E(P, μ_m, ∇) = m+1`, or if `φ_0` vanishes on the grid.
    pub fn new(manifold: &AffineManifold, p: &EvalPoint, grid: &[Vec<f64>]) -> Result<Self> {
        let report = strong_flatness_test(manifold, p)?;
        if !report.strongly_flat {
            return Err(Error::Precondition(format!(
                "not strongly projectively flat at the basepoint (dim E = {})",
                report.space.dim
            )));
        }
        let m = manifold.dim();
        let system = CompiledJetSystem::new(&JetSystem::new(manifold, &distinguished_eigenvalue(m)));
        let basepoint = p.to_f64();
        let radius = default_radius(manifold, &basepoint);
        let mut chart = Self { basepoint, system, radius, points: grid.to_vec(), z: Vec::new() };
        chart.z = grid.iter().map(|x| chart.eval(x).map(|(z, _)| z)).collect::<Result<_>>()?;
        Ok(chart)
    }

    pub fn basepoint(&self) -> &[f64] {
        &self.basepoint
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `z(x)` and its Jacobian `∂z^i/∂x^j`, by transporting the unit jets from `P`.
    pub fn eval(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let m = self.system.dim();
        let path = [self.basepoint.clone(), x.to_vec()];
        let phi = (0..=m)
            .map(|i| {
                let e: Vec<f64> = (0..=m).map(|j| if i == j { 1.0 } else { 0.0 }).collect();
                self.system.transport(&path, &e, DEFAULT_STEPS)
            })
            .collect::<Result<Vec<_>>>()?;
        let f0 = phi[0][0];
        if f0.abs() < PHI0_MIN {
            return Err(Error::Precondition(format!("phi_0 vanishes near {x:?}; shrink the grid")));
        }
        let z = (1..=m).map(|i| phi[i][0] / f0).collect();
        let dz = (1..=m)
            .map(|i| (0..m).map(|j| (phi[i][j + 1] * f0 - phi[i][0] * phi[0][j + 1]) / (f0 * f0)).collect())
            .collect();
        Ok((z, dz))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ChartJson { points: &self.points, z: &self.z }).expect("chart serializes")
    }
}

/// RK4 for `ẍ^k = −Γ_ij^k ẋ^i ẋ^j` on `[0, t_end]`, returning `samples + 1` evenly spaced points.
fn geodesic(
    gamma: &[CompiledExpr],
    m: usize,
    x0: &[f64],
    v0: &[f64],
    t_end: f64,
    samples: usize,
) -> Result<Vec<Vec<f64>>> {
    let accel = |x: &[f64], v: &[f64]| -> Result<Vec<f64>> {
        let mut a = vec![0.0; m];
        for i in 0..m {
            for j in 0..m {
                for (k, ak) in a.iter_mut().enumerate() {
                    *ak -= gamma[(i * m + j) * m + k].eval(x) * v[i] * v[j];
                }
            }
        }
        if a.iter().all(|y| y.is_finite()) {
            Ok(a)
        } else {
            Err(Error::NonFinite)
        }
    };
    let per_sample = GEODESIC_STEPS.div_ceil(samples);
    let h = t_end / (per_sample * samples) as f64;
    let (mut x, mut v) = (x0.to_vec(), v0.to_vec());
    let mut out = vec![x.clone()];
    let add = |a: &[f64], b: &[f64], s: f64| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p + s * q).collect() };
    for _ in 0..samples {
        for _ in 0..per_sample {
            let k1x = v.clone();
            let k1v = accel(&x, &v)?;
            let k2x = add(&v, &k1v, h / 2.0);
            let k2v = accel(&add(&x, &k1x, h / 2.0), &k2x)?;
            let k3x = add(&v, &k2v, h / 2.0);
            let k3v = accel(&add(&x, &k2x, h / 2.0), &k3x)?;
            let k4x = add(&v, &k3v, h);
            let k4v = accel(&add(&x, &k3x, h), &k4x)?;
            for k in 0..m {
                x[k] += h / 6.0 * (k1x[k] + 2.0 * k2x[k] + 2.0 * k3x[k] + k4x[k]);
                v[k] += h / 6.0 * (k1v[k] + 2.0 * k2v[k] + 2.0 * k3v[k] + k4v[k]);
            }
        }
        out.push(x.clone());
    }
    Ok(out)
}

fn chord_deviation(z: &[Vec<f64>]) -> f64 {
    let (a, b) = (&z[0], &z[z.len() - 1]);
    let d: Vec<f64> = b.iter().zip(a).map(|(p, q)| p - q).collect();
    let len = d.iter().map(|x| x * x).sum::<f64>().sqrt();
    if len == 0.0 {
        return 0.0;
    }
    z.iter()
        .map(|p| {
            let w: Vec<f64> = p.iter().zip(a).map(|(x, y)| x - y).collect();
            let t = w.iter().zip(&d).map(|(x, y)| x * y).sum::<f64>() / (len * len);
            let perp = w.iter().zip(&d).map(|(x, y)| (x - t * y).powi(2)).sum::<f64>().sqrt();
            perp / len
        })
        .fold(0.0, f64::max)
}

/// Maximum relative deviation of chart images of `n` random geodesics
/// through `P` from their chords.
///
/// Each geodesic starts with a random unit velocity and runs for the chart
/// radius; a geodesic that leaves twice that radius is retried with half the
/// horizon, at most four times.
pub fn geodesic_straightness<R: Rng + ?Sized>(
    manifold: &AffineManifold,
    chart: &FlatChart,
    n: usize,
    rng: &mut R,
    exec: Execution,
) -> Result<f64> {
    let m = manifold.dim();
    let gamma: Vec<CompiledExpr> =
        (0..m * m * m).map(|f| manifold.gamma(f / (m * m), (f / m) % m, f % m)).map(CompiledExpr::new).collect();
    let dirs: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
            v.into_iter().map(|x| x / norm).collect()
        })
        .collect();
    let p = chart.basepoint();
    let devs = exec.map(&dirs, |v| -> Result<f64> {
        let mut horizon = chart.radius();
        for _ in 0..=4 {
            let pts = geodesic(&gamma, m, p, v, horizon, GEODESIC_SAMPLES)?;
            let far = pts
                .iter()
                .any(|x| x.iter().zip(p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() > 2.0 * chart.radius());
            if far {
                horizon /= 2.0;
                continue;
            }
            let z = pts.iter().map(|x| chart.eval(x).map(|(z, _)| z)).collect::<Result<Vec<_>>>()?;
            return Ok(chord_deviation(&z));
        }
        Err(Error::Precondition("geodesic leaves the chart region".into()))
    });
    devs.into_iter().try_fold(0.0, |acc, d| Ok(f64::max(acc, d?)))
}
