use num_complex::Complex64;

use super::MultiPoly;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, modulus_order};
use crate::matrix::{ComplexMatrix, ONE, ZERO};

/// Leading coefficients smaller than this fraction of the largest one are
/// treated as vanished.
pub const LEADING_TOL: f64 = 1e-10;

/// An `m`-fold cluster of roots splits to radius about `ε^{1/m}` under a
/// relative coefficient perturbation `ε`; clusters are accepted below
/// `ROOT_EPS^{1/m}·(1 + |mean|)`.
const ROOT_EPS: f64 = 1e-12;

const NEWTON_STEPS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
    /// `|q(value)|`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct UnivariateRoots {
    /// Distinct roots in order of decreasing modulus.
    pub roots: Vec<Root>,
    /// Roots lost to a vanishing leading coefficient.
    pub at_infinity: usize,
}

impl UnivariateRoots {
    /// Number of finite roots counted with multiplicity.
    pub fn count(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Finite roots repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity))
            .collect()
    }
}

fn horner(c: &[Complex64], t: Complex64) -> Complex64 {
    c.iter().rev().fold(ZERO, |acc, &x| acc * t + x)
}

fn horner_with_derivative(c: &[Complex64], t: Complex64) -> (Complex64, Complex64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &x in c.iter().rev() {
        dp = dp * t + p;
        p = p * t + x;
    }
    (p, dp)
}

/// Roots of a univariate polynomial with multiplicities.
///
/// Uses the eigenvalues of the companion matrix of a rescaled monic
/// version, followed by guarded Newton polishing. Fails with
/// [`Error::DegenerateLeadingCoefficient`] when the leading coefficient is
/// negligible relative to the others.
pub fn roots(q: &MultiPoly) -> Result<UnivariateRoots> {
    let c = q.univariate_coefficients()?;
    if q.is_zero() {
        return Err(Error::InvalidInput("roots of the zero polynomial".into()));
    }
    let scale = q.max_abs_coefficient();
    let lead = *c.last().expect("nonempty");
    if lead.norm() < LEADING_TOL * scale {
        return Err(Error::DegenerateLeadingCoefficient {
            leading: lead.norm(),
            scale,
        });
    }
    dense_roots(&c)
}

/// Like [`roots`], but negligible leading coefficients are dropped and the
/// lost degree is reported in [`UnivariateRoots::at_infinity`].
pub fn roots_allowing_degree_drop(q: &MultiPoly) -> Result<UnivariateRoots> {
    let mut c = q.univariate_coefficients()?;
    if q.is_zero() {
        return Err(Error::InvalidInput("roots of the zero polynomial".into()));
    }
    let scale = q.max_abs_coefficient();
    let mut dropped = 0;
    while c.last().is_some_and(|x| x.norm() < LEADING_TOL * scale) {
        c.pop();
        dropped += 1;
    }
    let mut out = dense_roots(&c)?;
    out.at_infinity = dropped;
    Ok(out)
}

fn dense_roots(c: &[Complex64]) -> Result<UnivariateRoots> {
    let degree = c.len() - 1;
    let zeros = c.iter().take_while(|x| **x == ZERO).count();
    let core = &c[zeros..];
    let d = core.len() - 1;
    let mut raw = vec![ZERO; zeros];
    if d > 0 {
        // t = ρ s balances the outer coefficients
        let rho = (core[0].norm() / core[d].norm()).powf(1.0 / d as f64);
        let rho = if rho.is_finite() && rho > 0.0 { rho } else { 1.0 };
        let scaled: Vec<Complex64> = core
            .iter()
            .enumerate()
            .map(|(j, x)| x * rho.powi(j as i32))
            .collect();
        let lead = scaled[d];
        let companion = ComplexMatrix::from_fn(d, |i, j| {
            if i == 0 {
                -scaled[d - 1 - j] / lead
            } else if j + 1 == i {
                ONE
            } else {
                ZERO
            }
        });
        raw.extend(eigenvalues(&companion)?.into_iter().map(|s| s * rho));
    }
    debug_assert_eq!(raw.len(), degree);
    let mut clusters = cluster(&raw);
    polish(core, &mut clusters);
    let mut roots: Vec<Root> = clusters
        .into_iter()
        .map(|(value, multiplicity)| Root {
            value,
            multiplicity,
            residual: horner(c, value).norm(),
        })
        .collect();
    roots.sort_by(|a, b| modulus_order(&a.value, &b.value));
    Ok(UnivariateRoots {
        roots,
        at_infinity: 0,
    })
}

fn derivative(c: &[Complex64]) -> Vec<Complex64> {
    if c.len() <= 1 {
        return vec![ZERO];
    }
    c.iter().enumerate().skip(1).map(|(j, x)| x * j as f64).collect()
}

/// Newton on `q^{(m−1)}`, which has a simple root at an `m`-fold root of `q`.
/// Steps must stay well inside the gap to every other cluster, so that no two
/// approximations can collapse onto the same root.
fn polish(c: &[Complex64], clusters: &mut [(Complex64, usize)]) {
    let values: Vec<Complex64> = clusters.iter().map(|x| x.0).collect();
    for (i, (x, m)) in clusters.iter_mut().enumerate() {
        let nearest = values
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, y)| (y - *x).norm())
            .fold(f64::INFINITY, f64::min);
        let mut g = c.to_vec();
        for _ in 1..*m {
            g = derivative(&g);
        }
        let mut fx = horner(&g, *x).norm();
        for _ in 0..NEWTON_STEPS {
            let (p, dp) = horner_with_derivative(&g, *x);
            if dp == ZERO || p == ZERO {
                break;
            }
            let step = p / dp;
            if step.norm() >= 0.1 * nearest {
                break;
            }
            let y = *x - step;
            let fy = horner(&g, y).norm();
            if fy.is_nan() || fy >= fx {
                break;
            }
            *x = y;
            fx = fy;
        }
    }
}

fn cluster_radius(m: usize, mean: Complex64) -> f64 {
    ROOT_EPS.powf(1.0 / m as f64) * (1.0 + mean.norm())
}

/// Greedy grouping, largest multiplicity first: a seed together with its
/// `m − 1` nearest unassigned neighbours forms a cluster when they all lie
/// within [`cluster_radius`] of their mean.
fn cluster(raw: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut free: Vec<usize> = (0..raw.len()).collect();
    let mut out = Vec::new();
    for m in (2..=raw.len()).rev() {
        let mut s = 0;
        while s < free.len() && free.len() >= m {
            let seed = raw[free[s]];
            let mut near: Vec<usize> = free.clone();
            near.sort_by(|&a, &b| {
                (raw[a] - seed)
                    .norm()
                    .partial_cmp(&(raw[b] - seed).norm())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            near.truncate(m);
            let mean = near.iter().map(|&i| raw[i]).sum::<Complex64>() / m as f64;
            let radius = near.iter().map(|&i| (raw[i] - mean).norm()).fold(0.0, f64::max);
            if radius <= cluster_radius(m, mean) {
                out.push((mean, m));
                free.retain(|i| !near.contains(i));
            } else {
                s += 1;
            }
        }
    }
    out.extend(free.into_iter().map(|i| (raw[i], 1)));
    out
}
