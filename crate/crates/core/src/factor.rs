//! Complete reducibility of characteristic polynomials into linear factors.
//!
//! [`factor_linear`] recovers factors `1 + ⟨a_k, z⟩` of a polynomial with
//! `p(0) = 1` by tracking the roots of `p` along lines through the origin.
//! On a line `z = t·u` every factor contributes the root `t = −1/⟨a_k, u⟩`,
//! and `⟨a_k, u⟩` is linear in `u`, so following each root as `u` moves to
//! `u + t e_j` (with `t` a random unit complex number) and differencing gives
//! `t` times the `j`-th coordinate of `a_k`. A final
//! comparison of `p` against the expanded product at random points decides the
//! verdict; nothing else is trusted.
//!
//! [`reducible_2x2`] is the closed-form test for a diagonal `A` and arbitrary
//! `B` of size two.

use std::cmp::Ordering;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ONE, ZERO};
use crate::poly::{roots, MultiPoly};
use crate::random::{complex_gaussian_vector, disk_point, rng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorConfig {
    /// Verdict threshold on the verification residual.
    pub tol: f64,
    pub seed: u64,
    /// Direction draws before giving up with [`Error::DegenerateDirections`].
    pub redraws: usize,
    /// Initial continuation steps per coordinate.
    pub steps: usize,
    /// Smallest step before a continuation is declared ambiguous.
    pub min_step: f64,
    /// Verification points.
    pub samples: usize,
}

impl Default for FactorConfig {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            seed: 42,
            redraws: 8,
            steps: 16,
            min_step: 1.0 / 1024.0,
            samples: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Reducible,
    NotReducible,
    Degenerate,
}

/// The factor `(1 + ⟨coeffs, z⟩)^mult`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearFactor {
    pub coeffs: Vec<Complex64>,
    pub mult: usize,
}

impl LinearFactor {
    pub fn evaluate(&self, z: &[Complex64]) -> Complex64 {
        let lin: Complex64 = self.coeffs.iter().zip(z).map(|(a, x)| a * x).sum();
        (ONE + lin).powu(self.mult as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearFactorization {
    pub verdict: Verdict,
    /// `max |p(z) − ∏ factors(z)| / (1 + |p(z)|)` over the verification
    /// points; infinite when extraction did not finish.
    pub residual: f64,
    pub factors: Vec<LinearFactor>,
}

impl LinearFactorization {
    pub fn is_reducible(&self) -> bool {
        self.verdict == Verdict::Reducible
    }

    /// `Σ m_k`.
    pub fn degree(&self) -> usize {
        self.factors.iter().map(|f| f.mult).sum()
    }

    pub fn evaluate(&self, z: &[Complex64]) -> Complex64 {
        self.factors.iter().map(|f| f.evaluate(z)).product()
    }

    /// The product of the factors as a polynomial.
    pub fn expand(&self, arity: usize) -> MultiPoly {
        self.factors.iter().fold(MultiPoly::one(arity), |acc, f| {
            acc.mul(&MultiPoly::linear_factor(&f.coeffs).pow(f.mult as u32))
        })
    }

    /// Factors repeated according to multiplicity.
    pub fn expanded_coefficients(&self) -> Vec<Vec<Complex64>> {
        self.factors
            .iter()
            .flat_map(|f| std::iter::repeat_n(f.coeffs.clone(), f.mult))
            .collect()
    }

    fn degenerate() -> Self {
        Self {
            verdict: Verdict::Degenerate,
            residual: f64::INFINITY,
            factors: Vec::new(),
        }
    }
}

/// `⟨a_k, u⟩` for every cluster of factors, with multiplicities, from the
/// roots of `s^d p(u/s) = Σ_j q_j(u) s^{d−j} = ∏ (s + ⟨a_k, u⟩)`.
fn line_values(p: &MultiPoly, u: &[Complex64]) -> Result<Vec<(Complex64, usize)>> {
    let q = p.homogeneous_values(u)?;
    let d = q.len() - 1;
    // balance: substitute s = σ s̃ with σ the root-size estimate
    let sigma = (1..=d)
        .map(|j| q[j].norm().powf(1.0 / j as f64))
        .fold(0.0, f64::max);
    let sigma = if sigma > 0.0 && sigma.is_finite() { sigma } else { 1.0 };
    let coeffs: Vec<Complex64> = (0..=d).map(|i| q[d - i] / sigma.powi((d - i) as i32)).collect();
    let found = roots(&MultiPoly::from_univariate(&coeffs))?;
    Ok(found
        .roots
        .into_iter()
        .map(|r| (-r.value * sigma, r.multiplicity))
        .collect())
}

enum Step {
    Matched(Vec<Complex64>),
    Ambiguous,
}

fn match_step(predicted: &[Complex64], mults: &[usize], next: &[(Complex64, usize)]) -> Step {
    if next.len() != predicted.len() {
        return Step::Ambiguous;
    }
    let mut taken = vec![false; next.len()];
    let mut out = Vec::with_capacity(predicted.len());
    for (pred, &m) in predicted.iter().zip(mults) {
        let mut dists: Vec<(usize, f64)> = next
            .iter()
            .enumerate()
            .filter(|(_, (_, mm))| *mm == m)
            .map(|(i, (v, _))| (i, (v - pred).norm()))
            .collect();
        dists.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal));
        let Some(&(best, d1)) = dists.first() else {
            return Step::Ambiguous;
        };
        if let Some(&(_, d2)) = dists.get(1) {
            if d2 <= 2.0 * d1 + 1e-12 * (1.0 + pred.norm()) {
                return Step::Ambiguous;
            }
        }
        if taken[best] {
            return Step::Ambiguous;
        }
        taken[best] = true;
        out.push(next[best].0);
    }
    Step::Matched(out)
}

/// `k`-th derivative at `s` of `Σ_i c_i s^i`.
fn derivative_at(c: &[Complex64], k: usize, s: Complex64) -> Complex64 {
    let mut acc = ZERO;
    for i in (k..c.len()).rev() {
        let falling: f64 = (i + 1 - k..=i).map(|x| x as f64).product();
        acc = acc * s + c[i] * falling;
    }
    acc
}

/// Initial speeds `dv_k/dτ` of the values `v_k` along `u → u + τ t e_j`.
///
/// With `r(s) = Σ_j q_j s^{d−j} = ∏(s + v_k)`, a cluster of multiplicity `m`
/// has `v′ = ∂ₛ^{m−1}∂_τ r / ∂ₛ^m r` at `s = −v`.
fn initial_slopes(
    p: &MultiPoly,
    u: &[Complex64],
    j: usize,
    t: Complex64,
    start: &[(Complex64, usize)],
) -> Result<Vec<Complex64>> {
    let q = p.homogeneous_values(u)?;
    let d = q.len() - 1;
    let dq = p.partial_derivative(j).homogeneous_values(u)?;
    // r(s) and ∂_τ r(s) in ascending powers of s
    let r: Vec<Complex64> = (0..=d).map(|i| q[d - i]).collect();
    let rt: Vec<Complex64> = (0..=d)
        .map(|i| {
            let deg = d - i;
            if deg == 0 {
                ZERO
            } else {
                dq.get(deg - 1).copied().unwrap_or(ZERO) * t
            }
        })
        .collect();
    Ok(start
        .iter()
        .map(|&(v, m)| {
            let den = derivative_at(&r, m, -v);
            if den == ZERO {
                ZERO
            } else {
                derivative_at(&rt, m - 1, -v) / den
            }
        })
        .collect())
}

/// Follows every cluster along `u → u + t·e_j`; `None` when the paths could
/// not be told apart at the minimum step.
fn continue_coordinate(
    p: &MultiPoly,
    u: &[Complex64],
    j: usize,
    t: Complex64,
    start: &[(Complex64, usize)],
    cfg: &FactorConfig,
) -> Result<Option<Vec<Complex64>>> {
    let mults: Vec<usize> = start.iter().map(|s| s.1).collect();
    let mut current: Vec<Complex64> = start.iter().map(|s| s.0).collect();
    let mut slope = initial_slopes(p, u, j, t, start)?;
    let base_step = 1.0 / cfg.steps.max(1) as f64;
    let mut h = base_step;
    let mut tau = 0.0;
    let mut point = u.to_vec();
    while tau < 1.0 {
        let step = h.min(1.0 - tau);
        point[j] = u[j] + t * (tau + step);
        let next = line_values(p, &point)?;
        let predicted: Vec<Complex64> = current.iter().zip(&slope).map(|(c, s)| c + s * step).collect();
        match match_step(&predicted, &mults, &next) {
            Step::Matched(found) => {
                for k in 0..current.len() {
                    slope[k] = (found[k] - current[k]) / step;
                }
                current = found;
                tau += step;
                h = (2.0 * h).min(base_step);
            }
            Step::Ambiguous => {
                h /= 2.0;
                if h < cfg.min_step {
                    return Ok(None);
                }
            }
        }
    }
    Ok(Some(current))
}

/// Decides whether `p` is a product of linear factors `1 + ⟨a_k, z⟩` and
/// extracts them.
///
/// `p` is normalized by its constant term, which must be nonzero. A failed
/// continuation yields [`Verdict::Degenerate`] rather than an error; the
/// verdict is `Reducible` only when the verification residual is within
/// `cfg.tol` and the multiplicities account for the full degree.
///
/// ```
/// use num_complex::Complex64;
/// use projspec::factor::{factor_linear, FactorConfig, Verdict};
/// use projspec::MultiPoly;
///
/// let c = |x: f64| Complex64::new(x, 0.0);
/// let p = MultiPoly::linear_factor(&[c(1.0), c(3.0)])
///     .mul(&MultiPoly::linear_factor(&[c(2.0), c(5.0)]));
/// let f = factor_linear(&p, &FactorConfig::default()).unwrap();
/// assert_eq!(f.verdict, Verdict::Reducible);
/// assert_eq!(f.factors.len(), 2);
/// ```
pub fn factor_linear(p: &MultiPoly, cfg: &FactorConfig) -> Result<LinearFactorization> {
    let c0 = p.constant_term();
    if c0 == ZERO {
        return Err(Error::InvalidInput("polynomial must not vanish at the origin".into()));
    }
    let p = p.scale(ONE / c0);
    let n = p.arity();
    let d = p.degree() as usize;
    if d == 0 {
        return Ok(LinearFactorization {
            verdict: Verdict::Reducible,
            residual: 0.0,
            factors: Vec::new(),
        });
    }

    // a draw is a direction u plus a unit complex step t_j per coordinate;
    // redraw when q_d(u) is negligible or some path cannot be followed
    let mut r = rng(cfg.seed);
    let mut usable = false;
    let mut found = None;
    for _ in 0..cfg.redraws.max(1) {
        let u = complex_gaussian_vector(n, &mut r);
        let t: Vec<Complex64> = (0..n)
            .map(|_| Complex64::from_polar(1.0, rand::Rng::random_range(&mut r, 0.0..std::f64::consts::TAU)))
            .collect();
        let q = p.homogeneous_values(&u)?;
        let scale = q.iter().map(|x| x.norm()).fold(0.0, f64::max);
        if q[d].norm() <= crate::poly::LEADING_TOL * scale {
            continue;
        }
        usable = true;
        let start = line_values(&p, &u)?;
        let ends: Vec<Option<Vec<Complex64>>> = (0..n)
            .into_par_iter()
            .map(|j| continue_coordinate(&p, &u, j, t[j], &start, cfg))
            .collect::<Result<_>>()?;
        if ends.iter().all(Option::is_some) {
            found = Some((start, t, ends));
            break;
        }
    }
    if !usable {
        return Err(Error::DegenerateDirections {
            attempts: cfg.redraws.max(1),
        });
    }
    let Some((start, t, ends)) = found else {
        return Ok(LinearFactorization::degenerate());
    };
    let mut factors: Vec<LinearFactor> = start
        .iter()
        .map(|&(_, m)| LinearFactor {
            coeffs: vec![ZERO; n],
            mult: m,
        })
        .collect();
    for (j, end) in ends.into_iter().enumerate() {
        let end = end.expect("checked above");
        for (k, f) in factors.iter_mut().enumerate() {
            f.coeffs[j] = (end[k] - start[k].0) / t[j];
        }
    }
    if factors.iter().any(|f| f.coeffs.iter().all(|x| *x == ZERO)) {
        return Ok(LinearFactorization::degenerate());
    }

    let amax = factors
        .iter()
        .flat_map(|f| f.coeffs.iter().map(|x| x.norm()))
        .fold(0.0, f64::max);
    let radius = 2.0 / (1.0 + amax);
    let mut vr = rng(cfg.seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    let candidate = LinearFactorization {
        verdict: Verdict::NotReducible,
        residual: 0.0,
        factors,
    };
    let mut residual: f64 = 0.0;
    for _ in 0..cfg.samples {
        let z: Vec<Complex64> = (0..n).map(|_| disk_point(radius, &mut vr)).collect();
        let pz = p.evaluate(&z)?;
        let fz = candidate.evaluate(&z);
        residual = residual.max((pz - fz).norm() / (1.0 + pz.norm()));
    }
    let verdict = if residual.is_finite() && residual <= cfg.tol && candidate.degree() == d {
        Verdict::Reducible
    } else {
        Verdict::NotReducible
    };
    Ok(LinearFactorization {
        verdict,
        residual,
        ..candidate
    })
}

/// The hyperplane `{z : 1 + ⟨normal, z⟩ = 0}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hyperplane {
    pub normal: Vec<Complex64>,
    pub multiplicity: usize,
}

impl Hyperplane {
    /// `1 + ⟨normal, z⟩`.
    pub fn equation(&self, z: &[Complex64]) -> Complex64 {
        ONE + self.normal.iter().zip(z).map(|(a, x)| a * x).sum::<Complex64>()
    }
}

pub fn factors_to_hyperplanes(f: &LinearFactorization) -> Result<Vec<Hyperplane>> {
    if f.verdict != Verdict::Reducible {
        return Err(Error::NotReducible);
    }
    f.factors
        .iter()
        .map(|fac| {
            if fac.coeffs.iter().all(|x| *x == ZERO) {
                Err(Error::ZeroNormal)
            } else {
                Ok(Hyperplane {
                    normal: fac.coeffs.clone(),
                    multiplicity: fac.mult,
                })
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoByTwoReport {
    /// Diagonal of `A`.
    pub lambda_pair: [Complex64; 2],
    /// Eigenvalues of `B` from the quadratic formula, `+` root first.
    pub mu_pair: [Complex64; 2],
    /// Residuals of the mixed `zw` coefficient for the pairings
    /// `(λ₁λ₂, μ₊μ₋)`, `(λ₁λ₂, μ₋μ₊)`, `(λ₂λ₁, μ₊μ₋)`, `(λ₂λ₁, μ₋μ₊)`,
    /// relative to `1 + max|λ|·max|B_ij|`.
    pub compatibility_residuals: [f64; 4],
    /// `|b| = |c|` and `a c̄ + b d̄ = ā b + c̄ d`, each within the tolerance.
    pub normality_check: [bool; 2],
    /// Raw residuals of the two normality equations.
    pub normality_residuals: [f64; 2],
    pub tol: f64,
}

impl TwoByTwoReport {
    pub fn min_residual(&self) -> f64 {
        self.compatibility_residuals.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn reducible(&self) -> bool {
        self.min_residual() <= self.tol
    }

    pub fn b_is_normal(&self) -> bool {
        self.normality_check.iter().all(|&x| x)
    }
}

/// Closed-form reducibility test for `det(I + zA + wB)` with `A` diagonal.
///
/// Matching `(1 + λ₁z + μ₁w)(1 + λ₂z + μ₂w)` against the expansion forces the
/// `λ`s to be the diagonal of `A` and the `μ`s to be the eigenvalues of `B`;
/// only the `zw` coefficient `λ₁μ₂ + λ₂μ₁ = a d₂ + d d₁` remains to check.
pub fn reducible_2x2(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<TwoByTwoReport> {
    for m in [a, b] {
        if m.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: m.dim(),
            });
        }
    }
    let off = a[(0, 1)].norm().max(a[(1, 0)].norm());
    if off > tol * (1.0 + a.max_abs()) {
        return Err(Error::NotDiagonal { residual: off });
    }
    let (d1, d2) = (a[(0, 0)], a[(1, 1)]);
    let (ba, bb, bc, bd) = (b[(0, 0)], b[(0, 1)], b[(1, 0)], b[(1, 1)]);
    let disc = ((ba - bd) * (ba - bd) + 4.0 * bb * bc).sqrt();
    let mu_p = (ba + bd + disc) / 2.0;
    let mu_m = (ba + bd - disc) / 2.0;
    let target = ba * d2 + bd * d1;
    let scale = 1.0 + d1.norm().max(d2.norm()) * b.max_abs();
    let res = |l1: Complex64, l2: Complex64, m1: Complex64, m2: Complex64| (l1 * m2 + l2 * m1 - target).norm() / scale;
    let compatibility_residuals = [
        res(d1, d2, mu_p, mu_m),
        res(d1, d2, mu_m, mu_p),
        res(d2, d1, mu_p, mu_m),
        res(d2, d1, mu_m, mu_p),
    ];
    let n1 = (bb.norm() - bc.norm()).abs();
    let n2 = (ba * bc.conj() + bb * bd.conj() - (ba.conj() * bb + bc.conj() * bd)).norm();
    let bscale = 1.0 + b.max_abs() * b.max_abs();
    Ok(TwoByTwoReport {
        lambda_pair: [d1, d2],
        mu_pair: [mu_p, mu_m],
        compatibility_residuals,
        normality_check: [n1 <= tol * (1.0 + b.max_abs()), n2 <= tol * bscale],
        normality_residuals: [n1, n2],
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::charpoly;
    use crate::random::{commuting_normal, complex_gaussian, random_normal};
    use crate::OperatorTuple;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn lin(a: &[f64]) -> MultiPoly {
        MultiPoly::linear_factor(&a.iter().map(|&x| c(x)).collect::<Vec<_>>())
    }

    fn has_factor(f: &LinearFactorization, a: &[Complex64], mult: usize, tol: f64) -> bool {
        f.factors.iter().any(|g| {
            g.mult == mult && g.coeffs.iter().zip(a).all(|(x, y)| (x - y).norm() < tol)
        })
    }

    #[test]
    fn counterexample_factors() {
        let p = lin(&[1.0, 3.0]).mul(&lin(&[2.0, 5.0]));
        let f = factor_linear(&p, &FactorConfig::default()).unwrap();
        assert_eq!(f.verdict, Verdict::Reducible);
        assert!(f.residual < 1e-9);
        assert!(has_factor(&f, &[c(1.0), c(3.0)], 1, 1e-9));
        assert!(has_factor(&f, &[c(2.0), c(5.0)], 1, 1e-9));
    }

    #[test]
    fn z_squared_plus_w_is_not_reducible() {
        let p = MultiPoly::from_terms(2, vec![(vec![0, 0], ONE), (vec![2, 0], ONE), (vec![0, 1], ONE)]);
        let f = factor_linear(&p, &FactorConfig::default()).unwrap();
        assert_ne!(f.verdict, Verdict::Reducible);
        assert!(f.residual > 1e-3);
    }

    #[test]
    fn perfect_square() {
        let p = lin(&[2.0, 5.0]).pow(2);
        let f = factor_linear(&p, &FactorConfig::default()).unwrap();
        assert_eq!(f.verdict, Verdict::Reducible);
        assert_eq!(f.factors.len(), 1);
        assert!(has_factor(&f, &[c(2.0), c(5.0)], 2, 1e-7));
    }

    #[test]
    fn mixed_multiplicities_three_variables() {
        let p = lin(&[1.0, -2.0, 0.5]).pow(3).mul(&lin(&[0.0, 1.0, 4.0])).mul(&lin(&[3.0, 0.0, 0.0]));
        let f = factor_linear(&p, &FactorConfig::default()).unwrap();
        assert_eq!(f.verdict, Verdict::Reducible, "{f:?}");
        assert_eq!(f.degree(), 5);
        assert!(has_factor(&f, &[c(1.0), c(-2.0), c(0.5)], 3, 1e-6));
    }

    #[test]
    fn nearly_equal_factors_are_kept_apart() {
        // the paths of the two close values run parallel; without a slope on
        // the first step every step looks ambiguous
        let p = lin(&[2.07, 0.0]).mul(&lin(&[-0.6207, 0.0])).mul(&lin(&[-0.6199, 0.0]));
        let f = factor_linear(&p, &FactorConfig::default()).unwrap();
        assert!(f.is_reducible(), "{f:?}");
        let mut first: Vec<f64> = f.factors.iter().map(|x| x.coeffs[0].re).collect();
        first.sort_by(f64::total_cmp);
        for (got, want) in first.iter().zip([-0.6207, -0.6199, 2.07]) {
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_polynomial() {
        let f = factor_linear(&MultiPoly::one(3), &FactorConfig::default()).unwrap();
        assert_eq!(f.verdict, Verdict::Reducible);
        assert!(f.factors.is_empty());
        assert!(factors_to_hyperplanes(&f).unwrap().is_empty());
        assert!(factor_linear(&MultiPoly::zero(2), &FactorConfig::default()).is_err());
    }

    #[test]
    fn commuting_normal_round_trip() {
        let mut r = rng(9);
        for (dim, arity) in [(2, 2), (3, 2), (4, 3), (5, 2)] {
            let cons = commuting_normal(dim, arity, &mut r);
            let f = factor_linear(&charpoly(&cons.tuple).unwrap(), &FactorConfig::default()).unwrap();
            assert_eq!(f.verdict, Verdict::Reducible);
            for joint in cons.joint_eigenvalues() {
                assert!(has_factor(&f, &joint, 1, 1e-6), "{joint:?} not in {f:?}");
            }
        }
    }

    #[test]
    fn non_commuting_normal_pair_is_not_reducible() {
        let mut r = rng(10);
        for _ in 0..5 {
            let t = OperatorTuple::pair(random_normal(3, &mut r), random_normal(3, &mut r)).unwrap();
            let f = factor_linear(&charpoly(&t).unwrap(), &FactorConfig::default()).unwrap();
            assert!(!f.is_reducible());
        }
    }

    #[test]
    fn hyperplanes() {
        let p = lin(&[1.0, 3.0]).mul(&lin(&[2.0, 5.0]));
        let f = factor_linear(&p, &FactorConfig::default()).unwrap();
        let hs = factors_to_hyperplanes(&f).unwrap();
        assert!(hs.iter().any(|h| h.equation(&[c(-1.0), c(0.0)]).norm() < 1e-9));
        let bad = LinearFactorization {
            verdict: Verdict::NotReducible,
            residual: 1.0,
            factors: vec![],
        };
        assert!(matches!(factors_to_hyperplanes(&bad), Err(Error::NotReducible)));
        let zero = LinearFactorization {
            verdict: Verdict::Reducible,
            residual: 0.0,
            factors: vec![LinearFactor { coeffs: vec![ZERO, ZERO], mult: 1 }],
        };
        assert!(matches!(factors_to_hyperplanes(&zero), Err(Error::ZeroNormal)));
    }

    #[test]
    fn json_shape() {
        let p = lin(&[1.0, 3.0]);
        let f = factor_linear(&p, &FactorConfig::default()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&f).unwrap();
        assert_eq!(v["verdict"], "reducible");
        assert_eq!(v["factors"][0]["mult"], 1);
        assert_eq!(v["factors"][0]["coeffs"].as_array().unwrap().len(), 2);
        assert!(v["factors"][0]["coeffs"][1][0].as_f64().unwrap() - 3.0 < 1e-9);
    }

    #[test]
    fn two_by_two_examples() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 2.0]);
        let b = ComplexMatrix::from_real_rows(&[&[3.0, 0.0], &[4.0, 5.0]]).unwrap();
        let rep = reducible_2x2(&a, &b, 1e-9).unwrap();
        assert!(rep.reducible());
        assert!(!rep.b_is_normal());

        let rep = reducible_2x2(&ComplexMatrix::identity(2), &b, 1e-9).unwrap();
        assert!(rep.min_residual() < 1e-15);

        let rep = reducible_2x2(&a, &ComplexMatrix::from_real_diag(&[7.0, 9.0]), 1e-9).unwrap();
        assert!(rep.reducible());
        assert!(rep.b_is_normal());
        let mut mus: Vec<f64> = rep.mu_pair.iter().map(|m| m.re).collect();
        mus.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(mus, vec![7.0, 9.0]);

        assert!(matches!(reducible_2x2(&b, &a, 1e-9), Err(Error::NotDiagonal { .. })));
        assert!(matches!(
            reducible_2x2(&ComplexMatrix::identity(3), &a, 1e-9),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn two_by_two_agrees_with_continuation(seed in 0u64..10_000) {
            let mut r = rng(seed);
            let d = [complex_gaussian(&mut r), complex_gaussian(&mut r)];
            let a = ComplexMatrix::from_diag(&d);
            let b = if rand::Rng::random::<bool>(&mut r) {
                ComplexMatrix::from_diag(&[complex_gaussian(&mut r), complex_gaussian(&mut r)])
            } else {
                random_normal(2, &mut r)
            };
            let rep = reducible_2x2(&a, &b, 1e-7).unwrap();
            let t = OperatorTuple::pair(a, b).unwrap();
            let f = factor_linear(&charpoly(&t).unwrap(), &FactorConfig::default()).unwrap();
            prop_assert_eq!(rep.reducible(), f.is_reducible());
        }
    }
}
