use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use super::MultiPoly;
use crate::error::{Error, Result};
use crate::linalg::determinant;
use crate::matrix::{OperatorTuple, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharpolyConfig {
    /// Radius of the circle carrying the interpolation nodes.
    pub radius: f64,
    /// Upper bound on the number of grid points `(N+1)ⁿ`.
    pub grid_cap: usize,
    /// Relative prune threshold for coefficients.
    pub prune: f64,
}

impl Default for CharpolyConfig {
    fn default() -> Self {
        Self {
            radius: 1.0,
            grid_cap: 1_000_000,
            prune: 1e-10,
        }
    }
}

/// `p(z) = det(I + Σ z_k A_k)` with default settings.
pub fn charpoly(tuple: &OperatorTuple) -> Result<MultiPoly> {
    charpoly_with(tuple, &CharpolyConfig::default())
}

/// Characteristic polynomial of a tuple by interpolation on a tensor grid of
/// scaled roots of unity.
///
/// Each entry of the pencil is affine in every variable, so the determinant
/// has degree at most `N` in each variable and `N + 1` nodes per axis
/// determine it exactly. Inversion is an inverse DFT along each axis.
pub fn charpoly_with(tuple: &OperatorTuple, cfg: &CharpolyConfig) -> Result<MultiPoly> {
    let n = tuple.dim();
    let arity = tuple.arity();
    let nodes = n + 1;
    let points = (nodes as u128).checked_pow(arity as u32).unwrap_or(u128::MAX);
    if points > cfg.grid_cap as u128 {
        return Err(Error::GridTooLarge {
            points,
            cap: cfg.grid_cap,
        });
    }
    let points = points as usize;
    let omega: Vec<Complex64> = (0..nodes)
        .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / nodes as f64))
        .collect();

    let index = |mut flat: usize| -> Vec<usize> {
        let mut idx = vec![0; arity];
        for slot in idx.iter_mut().rev() {
            *slot = flat % nodes;
            flat /= nodes;
        }
        idx
    };

    let mut values: Vec<Complex64> = (0..points)
        .into_par_iter()
        .map(|flat| {
            let z: Vec<Complex64> = index(flat).iter().map(|&j| omega[j] * cfg.radius).collect();
            tuple.pencil(&z).map(|m| determinant(&m))
        })
        .collect::<Result<_>>()?;
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::InvalidInput("non-finite determinant on the grid".into()));
    }

    // inverse DFT along each axis; the last axis varies fastest
    let mut line = vec![ZERO; nodes];
    for axis in 0..arity {
        let stride = nodes.pow((arity - 1 - axis) as u32);
        for start in 0..points {
            if !(start / stride).is_multiple_of(nodes) {
                continue;
            }
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = values[start + j * stride];
            }
            for e in 0..nodes {
                let mut s = ZERO;
                for (j, v) in line.iter().enumerate() {
                    s += v * omega[(e * j) % nodes].conj();
                }
                values[start + e * stride] = s / nodes as f64;
            }
        }
    }

    let mut terms = Vec::new();
    for (flat, v) in values.into_iter().enumerate() {
        let e: Vec<u32> = index(flat).into_iter().map(|x| x as u32).collect();
        let deg: u32 = e.iter().sum();
        if deg == 0 || deg as usize > n {
            continue;
        }
        terms.push((e, v / cfg.radius.powi(deg as i32)));
    }
    let raw = MultiPoly::from_terms(arity, terms);
    let cut = cfg.prune * raw.max_abs_coefficient().max(1.0);
    let kept = raw.terms().filter(|(_, c)| c.norm() >= cut).map(|(e, c)| (e.to_vec(), c));
    // det(I) = 1 exactly
    Ok(MultiPoly::from_terms(
        arity,
        std::iter::once((vec![0; arity], ONE)).chain(kept),
    ))
}
