//! JSON manifold documents:
//! `{"dim": m, "coords": [...], "christoffel": {"i,j^k": "<expr>"}, "excluded": [...]}`.
//!
//! Keys are 1-based. Omitted symbols are zero, except that an entry whose
//! mirror `j,i^k` is omitted also defines the mirror.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{default_coords, AffineManifold};
use crate::expr::{parse_scalar, Expr};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldDoc {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<String>>,
    #[serde(default)]
    pub christoffel: BTreeMap<String, String>,
    #[serde(default)]
    pub excluded: Vec<String>,
}

fn parse_key(key: &str, m: usize) -> Result<(usize, usize, usize)> {
    let bad = || Error::Document(format!("bad Christoffel key `{key}`, expected \"i,j^k\""));
    let (lower, upper) = key.split_once('^').ok_or_else(bad)?;
    let (i, j) = lower.split_once(',').ok_or_else(bad)?;
    let idx = |s: &str| -> Result<usize> {
        let v: usize = s.trim().parse().map_err(|_| bad())?;
        if v == 0 || v > m {
            return Err(Error::Document(format!("index {v} in `{key}` outside 1..={m}")));
        }
        Ok(v - 1)
    };
    Ok((idx(i)?, idx(j)?, idx(upper)?))
}

impl ManifoldDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn build(&self) -> Result<AffineManifold> {
        let m = self.dim;
        if m < 2 {
            return Err(Error::BadDimension(format!("dimension must be at least 2, got {m}")));
        }
        let coords = match &self.coords {
            Some(c) if c.len() != m => {
                return Err(Error::BadDimension(format!("{} coordinate names for dimension {m}", c.len())));
            }
            Some(c) => c.clone(),
            None => default_coords(m),
        };
        let mut given: BTreeMap<(usize, usize, usize), Expr> = BTreeMap::new();
        for (key, text) in &self.christoffel {
            let ijk = parse_key(key, m)?;
            let e = parse_scalar(text, &coords)?;
            if given.insert(ijk, e).is_some() {
                return Err(Error::Document(format!("duplicate Christoffel key `{key}`")));
            }
        }
        let mut grid = vec![Expr::zero(); m * m * m];
        for (&(i, j, k), e) in &given {
            grid[(i * m + j) * m + k] = e.clone();
            if !given.contains_key(&(j, i, k)) {
                grid[(j * m + i) * m + k] = e.clone();
            }
        }
        let excluded = self.excluded.iter().map(|t| parse_scalar(t, &coords)).collect::<Result<Vec<_>>>()?;
        AffineManifold::new(coords, grid, excluded)
    }
}

impl AffineManifold {
    pub fn load(text: &str) -> Result<Self> {
        ManifoldDoc::from_json(text)?.build()
    }

    /// Document with only the nonzero `i <= j` entries.
    pub fn to_doc(&self) -> ManifoldDoc {
        let m = self.dim();
        let names = self.coords();
        let mut christoffel = BTreeMap::new();
        for i in 0..m {
            for j in i..m {
                for k in 0..m {
                    let e = self.gamma(i, j, k);
                    if !e.is_zero_literal() {
                        christoffel.insert(format!("{},{}^{}", i + 1, j + 1, k + 1), e.display_with(names).to_string());
                    }
                }
            }
        }
        let coords = (names != default_coords(m).as_slice()).then(|| names.to_vec());
        let excluded = self.excluded().iter().map(|e| e.display_with(names).to_string()).collect();
        ManifoldDoc { dim: m, coords, christoffel, excluded }
    }
}
