use std::fs;
use std::path::Path;

use affine_qe::expr::{parse_rational, parse_scalar, EvalPoint, Expr, Rational};
use affine_qe::geometry::AffineManifold;
use affine_qe::sample::MAX_SAMPLE_TRIES;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::Mode;

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] affine_qe::Error),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, InputError>;

pub fn load_manifold(path: &Path) -> Result<AffineManifold> {
    let text =
        fs::read_to_string(path).map_err(|source| InputError::Io { path: path.display().to_string(), source })?;
    Ok(AffineManifold::load(&text)?)
}

pub fn rationals(text: &str) -> Result<Vec<Rational>> {
    text.split(',').filter(|s| !s.trim().is_empty()).map(|s| Ok(parse_rational(s)?)).collect()
}

/// Flatten repeated and comma-separated `--mu` values.
pub fn mu_list(values: &[String]) -> Result<Vec<Rational>> {
    let mut out = Vec::new();
    for v in values {
        out.extend(rationals(v)?);
    }
    if out.is_empty() {
        return Err(InputError::Usage("no eigenvalue given".into()));
    }
    Ok(out)
}

pub fn single_mu(text: &str) -> Result<Rational> {
    Ok(parse_rational(text)?)
}

pub fn expr_list(text: &str, coords: &[String]) -> Result<Vec<Expr>> {
    text.split(',').map(|s| Ok(parse_scalar(s, coords)?)).collect()
}

pub fn scalar(text: &str, coords: &[String]) -> Result<Expr> {
    Ok(parse_scalar(text, coords)?)
}

/// The given basepoint, else the origin when admissible, else a seeded random rational point.
pub fn basepoint(manifold: &AffineManifold, given: Option<&str>, seed: u64, mode: Mode) -> Result<EvalPoint> {
    let exact = match given {
        Some(text) => {
            let p = rationals(text)?;
            manifold.check_point(&EvalPoint::Exact(p.clone()))?;
            p
        }
        None => {
            let origin = vec![Rational::from_integer(0.into()); manifold.dim()];
            if manifold.check_point(&EvalPoint::Exact(origin.clone())).is_ok() {
                origin
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..MAX_SAMPLE_TRIES)
                    .find_map(|_| manifold.random_exact_point(&mut rng).ok())
                    .ok_or_else(|| InputError::Usage("no admissible basepoint found; pass --basepoint".into()))?
            }
        }
    };
    Ok(match mode {
        Mode::Exact => EvalPoint::Exact(exact),
        Mode::Float => EvalPoint::Float(EvalPoint::Exact(exact).to_f64()),
    })
}

/// Parse `i,j=expr` deformation entries into a symmetric `m × m` grid.
pub fn phi_grid(entries: &[String], coords: &[String]) -> Result<Vec<Vec<Expr>>> {
    let m = coords.len();
    let mut grid = vec![vec![Expr::zero(); m]; m];
    for entry in entries {
        let (key, value) = entry
            .split_once('=')
            .ok_or_else(|| InputError::Usage(format!("--phi entry `{entry}` is not `i,j=expr`")))?;
        let idx: Vec<usize> = key
            .split(',')
            .map(|s| s.trim().parse::<usize>().ok().filter(|&i| (1..=m).contains(&i)))
            .collect::<Option<_>>()
            .filter(|v: &Vec<usize>| v.len() == 2)
            .ok_or_else(|| InputError::Usage(format!("--phi key `{key}` is not a pair of indices in 1..={m}")))?;
        let e = scalar(value, coords)?;
        grid[idx[0] - 1][idx[1] - 1] = e.clone();
        grid[idx[1] - 1][idx[0] - 1] = e;
    }
    Ok(grid)
}
