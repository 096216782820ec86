//! Multivariate polynomials with complex coefficients.
//!
//! [`MultiPoly`] is a sparse map from exponent vectors to coefficients. It is
//! the home of the characteristic polynomial `det(I + Σ z_k A_k)`, built by
//! [`charpoly`], and of the univariate restrictions that [`roots`] solves.

mod charpoly;
mod roots;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use charpoly::{charpoly, charpoly_with, CharpolyConfig};
pub use roots::{roots, roots_allowing_degree_drop, Root, UnivariateRoots, LEADING_TOL};

use crate::error::{Error, Result};
use crate::matrix::{ONE, ZERO};

/// Sparse multivariate polynomial in `arity` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    arity: usize,
    terms: BTreeMap<Vec<u32>, Complex64>,
    degree: u32,
}

fn total(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl MultiPoly {
    pub fn zero(arity: usize) -> Self {
        Self {
            arity,
            terms: BTreeMap::new(),
            degree: 0,
        }
    }

    pub fn constant(arity: usize, c: Complex64) -> Self {
        Self::from_terms(arity, [(vec![0; arity], c)])
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, ONE)
    }

    /// `1 + a₁z₁ + … + aₙzₙ`.
    pub fn linear_factor(a: &[Complex64]) -> Self {
        let n = a.len();
        let mut terms = vec![(vec![0; n], ONE)];
        for (k, &ak) in a.iter().enumerate() {
            let mut e = vec![0; n];
            e[k] = 1;
            terms.push((e, ak));
        }
        Self::from_terms(n, terms)
    }

    /// Sums repeated exponents and drops exact zeros.
    ///
    /// # Panics
    /// If an exponent vector does not have `arity` entries.
    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Vec<u32>, Complex64)>) -> Self {
        let mut map: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), arity, "exponent vector length must equal arity");
            *map.entry(e).or_insert(ZERO) += c;
        }
        map.retain(|_, c| *c != ZERO);
        let degree = map.keys().map(|e| total(e)).max().unwrap_or(0);
        Self {
            arity,
            terms: map,
            degree,
        }
    }

    /// Univariate polynomial from ascending dense coefficients.
    pub fn from_univariate(coeffs: &[Complex64]) -> Self {
        Self::from_terms(
            1,
            coeffs.iter().enumerate().map(|(j, &c)| (vec![j as u32], c)),
        )
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Complex64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn coefficient(&self, exp: &[u32]) -> Complex64 {
        self.terms.get(exp).copied().unwrap_or(ZERO)
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coefficient(&vec![0; self.arity])
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops every coefficient with modulus below `rel · max|c|`.
    pub fn pruned(&self, rel: f64) -> Self {
        let cut = rel * self.max_abs_coefficient();
        Self::from_terms(
            self.arity,
            self.terms
                .iter()
                .filter(|(_, c)| c.norm() >= cut)
                .map(|(e, c)| (e.clone(), *c)),
        )
    }

    fn check_point(&self, z: &[Complex64]) -> Result<()> {
        if z.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                actual: z.len(),
            });
        }
        Ok(())
    }

    /// Nested Horner evaluation, one variable at a time.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64> {
        self.check_point(z)?;
        let terms: Vec<(&[u32], Complex64)> = self.terms().collect();
        Ok(horner(&terms, z, 0))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.arity, self.terms.iter().map(|(e, c)| (e.clone(), c * s)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity, "arity mismatch");
        Self::from_terms(
            self.arity,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(e, c)| (e.clone(), *c)),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity, "arity mismatch");
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.push((e, ca * cb));
            }
        }
        Self::from_terms(self.arity, out)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.arity), |acc, _| acc.mul(self))
    }

    /// Exact partial derivative with respect to variable `var`.
    pub fn partial_derivative(&self, var: usize) -> Self {
        assert!(var < self.arity, "variable index out of range");
        Self::from_terms(
            self.arity,
            self.terms.iter().filter(|(e, _)| e[var] > 0).map(|(e, c)| {
                let mut d = e.clone();
                d[var] -= 1;
                (d, c * e[var] as f64)
            }),
        )
    }

    pub fn gradient(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_point(z)?;
        (0..self.arity)
            .map(|k| self.partial_derivative(k).evaluate(z))
            .collect()
    }

    /// Values of the homogeneous components at `u`: entry `j` is
    /// `Σ_{|e| = j} c_e u^e`, for `j = 0..=degree`.
    pub fn homogeneous_values(&self, u: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_point(u)?;
        let mut out = vec![ZERO; self.degree as usize + 1];
        for (e, c) in &self.terms {
            let mono: Complex64 = e.iter().zip(u).map(|(&k, x)| x.powu(k)).product();
            out[total(e) as usize] += c * mono;
        }
        Ok(out)
    }

    /// `q(t) = p(base + t·dir)` as a univariate polynomial.
    pub fn restrict_to_line(&self, base: &[Complex64], dir: &[Complex64]) -> Result<Self> {
        self.check_point(base)?;
        self.check_point(dir)?;
        let max_exp: Vec<u32> = (0..self.arity)
            .map(|k| self.terms.keys().map(|e| e[k]).max().unwrap_or(0))
            .collect();
        // powers[k][m] = ascending coefficients of (base_k + t dir_k)^m
        let powers: Vec<Vec<Vec<Complex64>>> = (0..self.arity)
            .map(|k| {
                let lin = [base[k], dir[k]];
                let mut ps = vec![vec![ONE]];
                for m in 1..=max_exp[k] as usize {
                    ps.push(poly_mul(&ps[m - 1], &lin));
                }
                ps
            })
            .collect();
        let mut acc = vec![ZERO; self.degree as usize + 1];
        for (e, c) in &self.terms {
            let mut term = vec![*c];
            for (k, &m) in e.iter().enumerate() {
                if m > 0 {
                    term = poly_mul(&term, &powers[k][m as usize]);
                }
            }
            for (j, v) in term.into_iter().enumerate() {
                acc[j] += v;
            }
        }
        Ok(Self::from_univariate(&acc))
    }

    /// Dense ascending coefficients of a univariate polynomial.
    pub fn univariate_coefficients(&self) -> Result<Vec<Complex64>> {
        if self.arity != 1 {
            return Err(Error::ArityMismatch {
                expected: 1,
                actual: self.arity,
            });
        }
        let mut out = vec![ZERO; self.degree as usize + 1];
        for (e, c) in &self.terms {
            out[e[0] as usize] = *c;
        }
        Ok(out)
    }

    /// Largest coefficientwise difference, over the union of supports.
    pub fn max_coefficient_distance(&self, other: &Self) -> f64 {
        self.sub(other).max_abs_coefficient()
    }
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Terms sorted lexicographically share contiguous runs of `e[var]`.
fn horner(terms: &[(&[u32], Complex64)], z: &[Complex64], var: usize) -> Complex64 {
    if terms.is_empty() {
        return ZERO;
    }
    if var == z.len() {
        return terms.iter().map(|t| t.1).sum();
    }
    // runs in ascending exponent order; fold from the highest
    type Run<'a, 'b> = (u32, &'a [(&'b [u32], Complex64)]);
    let mut runs: Vec<Run> = Vec::new();
    let mut start = 0;
    for i in 1..=terms.len() {
        if i == terms.len() || terms[i].0[var] != terms[start].0[var] {
            runs.push((terms[start].0[var], &terms[start..i]));
            start = i;
        }
    }
    let mut acc = ZERO;
    let mut prev = runs.last().expect("nonempty").0;
    for &(e, run) in runs.iter().rev() {
        acc = acc * z[var].powu(prev - e) + horner(run, z, var + 1);
        prev = e;
    }
    acc * z[var].powu(prev)
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    exp: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyDoc {
    arity: usize,
    terms: Vec<TermDoc>,
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyDoc {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermDoc {
                    exp: e.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = PolyDoc::deserialize(d)?;
        if doc.terms.iter().any(|t| t.exp.len() != doc.arity) {
            return Err(D::Error::custom("exponent length does not match arity"));
        }
        Ok(Self::from_terms(
            doc.arity,
            doc.terms
                .into_iter()
                .map(|t| (t.exp, Complex64::new(t.re, t.im))),
        ))
    }
}
