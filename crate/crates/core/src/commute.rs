//! Commutativity, reducibility and hyperplane spectra, checked side by side.
//!
//! For tuples of normal matrices the three properties coincide: the tuple
//! commutes, its characteristic polynomial splits into linear factors, and its
//! joint point spectrum is a union of hyperplanes. [`equivalence_report`]
//! evaluates all three independently. Without normality only commutativity
//! implies the other two; the pair `diag(1, 2)`, `[[3, 0], [4, 5]]` is reducible
//! yet does not commute, and the report marks such cases as a non-normal gap.

use std::cmp::Ordering;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::{factor_linear, FactorConfig, LinearFactor, Verdict};
use crate::linalg::{commutator_norm, eig_normal, eig_normal_grouped, grouping_threshold, schur};
use crate::matrix::{inner, vec_norm, ComplexMatrix, OperatorTuple, ZERO};
use crate::poly::charpoly;
use crate::spectra::hyperplane_membership;

/// Leakage allowance factor for invariant subspaces.
const LEAKAGE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceConfig {
    pub tol: f64,
    pub seed: u64,
    /// Sample points per hyperplane.
    pub samples: usize,
}

impl Default for EquivalenceConfig {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            seed: 42,
            samples: 20,
        }
    }
}

impl EquivalenceConfig {
    pub fn factor_config(&self) -> FactorConfig {
        FactorConfig {
            tol: self.tol,
            seed: self.seed,
            ..FactorConfig::default()
        }
    }
}

/// A common orthonormal eigenbasis: `U* A_j U ≈ diag(diagonals[j])`.
#[derive(Debug, Clone)]
pub struct JointDiagonalization {
    pub unitary: ComplexMatrix,
    pub diagonals: Vec<Vec<Complex64>>,
    /// `max_j ‖U* A_j U − diag(λ_j)‖ / ‖A_j‖`.
    pub residual: f64,
}

impl JointDiagonalization {
    /// `(λ_{1k}, …, λ_{nk})` for every column `k` of `U`.
    pub fn joint_eigenvalues(&self) -> Vec<Vec<Complex64>> {
        let n = self.unitary.dim();
        (0..n).map(|k| self.diagonals.iter().map(|d| d[k]).collect()).collect()
    }

    /// `U diag(λ_j) U*`.
    pub fn reconstruct(&self, j: usize) -> ComplexMatrix {
        let d = ComplexMatrix::from_diag(&self.diagonals[j]);
        &(&self.unitary * &d) * &self.unitary.adjoint()
    }
}

/// Common eigenbasis of a commuting tuple of normal matrices.
///
/// The space is split into eigenspaces of `A₁` (largest modulus first), each
/// eigenspace is split again by the compression of `A₂`, and so on. Each
/// compression is checked for leakage `‖(I − QQ*) A_j Q‖`.
pub fn simultaneous_diagonalize(tuple: &OperatorTuple, tol: f64) -> Result<JointDiagonalization> {
    for (k, m) in tuple.matrices().iter().enumerate() {
        if tuple.is_negligible(k) {
            continue;
        }
        let norm = m.norm();
        let residual = m.normality_residual();
        if residual > tol * norm * norm {
            return Err(Error::NotNormal {
                residual: residual / (norm * norm),
            });
        }
    }
    let rel = tuple.max_relative_commutator();
    if rel > tol {
        return Err(Error::NotCommuting { leakage: rel });
    }
    let dim = tuple.dim();
    let mut blocks: Vec<Vec<Vec<Complex64>>> = vec![(0..dim)
        .map(|k| {
            let mut e = vec![ZERO; dim];
            e[k] = Complex64::new(1.0, 0.0);
            e
        })
        .collect()];
    for (k, a) in tuple.matrices().iter().enumerate() {
        let norm = a.norm();
        if norm == 0.0 || tuple.is_negligible(k) {
            continue;
        }
        let mut refined = Vec::with_capacity(blocks.len());
        for block in blocks {
            if block.len() == 1 {
                refined.push(block);
                continue;
            }
            let m = a.compress(&block);
            let leakage = block_leakage(a, &block, &m);
            if leakage > LEAKAGE_FACTOR * tol * norm {
                return Err(Error::NotCommuting {
                    leakage: leakage / norm,
                });
            }
            let dec = eig_normal_grouped(&m, tol.max(1e-12), grouping_threshold(norm))?;
            for k in 0..dec.clusters.len() {
                let coords = dec.cluster_basis(k);
                refined.push(coords.iter().map(|y| combine(&block, y)).collect());
            }
        }
        blocks = refined;
    }
    let columns: Vec<Vec<Complex64>> = blocks.into_iter().flatten().collect();
    let unitary = ComplexMatrix::from_fn(dim, |i, j| columns[j][i]);
    let mut residual: f64 = 0.0;
    let diagonals = tuple
        .matrices()
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let d = &(&unitary.adjoint() * a) * &unitary;
            let diag = d.diagonal();
            let norm = a.norm();
            if norm > 0.0 && !tuple.is_negligible(k) {
                residual = residual.max((&d - &ComplexMatrix::from_diag(&diag)).norm() / norm);
            }
            diag
        })
        .collect();
    Ok(JointDiagonalization {
        unitary,
        diagonals,
        residual,
    })
}

/// `Σ_i y_i q_i`.
fn combine(basis: &[Vec<Complex64>], y: &[Complex64]) -> Vec<Complex64> {
    let n = basis[0].len();
    let mut out = vec![ZERO; n];
    for (q, &c) in basis.iter().zip(y) {
        for (o, x) in out.iter_mut().zip(q) {
            *o += c * x;
        }
    }
    out
}

/// Frobenius norm of `A Q − Q M` with `M = Q* A Q`, an upper bound for the
/// leakage `‖(I − QQ*) A Q‖`.
fn block_leakage(a: &ComplexMatrix, block: &[Vec<Complex64>], m: &ComplexMatrix) -> f64 {
    let mut total = 0.0;
    for (j, q) in block.iter().enumerate() {
        let mut r = a.mul_vec(q);
        for (i, qi) in block.iter().enumerate() {
            for (x, y) in r.iter_mut().zip(qi) {
                *x -= m[(i, j)] * y;
            }
        }
        total += r.iter().map(|x| x.norm_sqr()).sum::<f64>();
    }
    total.sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// `max ‖A_i A_j − A_j A_i‖`.
    pub direct: f64,
    /// `max ‖A_i A_j − A_j A_i‖ / (‖A_i‖‖A_j‖)`.
    pub relative_commutator: f64,
    pub commute: bool,
    pub verdict: Verdict,
    pub residual: f64,
    pub factors: Vec<LinearFactor>,
    pub reducible: bool,
    /// Membership of each factor's hyperplane in the joint point spectrum.
    pub hyperplanes: Vec<bool>,
    pub hyperplane_witness_ratios: Vec<f64>,
    /// Reducible and every factor hyperplane contained in the spectrum.
    pub hyperplane_spectrum: bool,
    pub all_normal: bool,
    pub all_selfadjoint: bool,
    /// Commutativity, reducibility and hyperplane structure agree.
    pub consistent: bool,
    /// Reducible with hyperplane spectrum but not commuting, for a
    /// non-normal tuple. Expected behaviour, reported for information.
    pub non_normal_gap: bool,
    /// Inconsistent on a normal tuple, or commuting but not reducible.
    pub violation: bool,
}

impl EquivalenceReport {
    /// Worth flagging to a caller: a violation or the non-normal gap.
    pub fn flagged(&self) -> bool {
        self.violation || self.non_normal_gap
    }
}

pub fn equivalence_report(tuple: &OperatorTuple, cfg: &EquivalenceConfig) -> Result<EquivalenceReport> {
    let mut direct: f64 = 0.0;
    for i in 0..tuple.arity() {
        for j in i + 1..tuple.arity() {
            direct = direct.max(commutator_norm(tuple.get(i), tuple.get(j))?);
        }
    }
    let relative_commutator = tuple.max_relative_commutator();
    let commute = relative_commutator <= cfg.tol;

    let f = factor_linear(&charpoly(tuple)?, &cfg.factor_config())?;
    let reducible = f.is_reducible();
    let checks: Vec<(bool, f64)> = if reducible {
        f.factors
            .par_iter()
            .map(|fac| {
                hyperplane_membership(tuple, &fac.coeffs, cfg.samples, cfg.tol, cfg.seed)
                    .map(|h| (h.contained, h.max_witness_ratio))
            })
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let hyperplanes: Vec<bool> = checks.iter().map(|c| c.0).collect();
    let hyperplane_spectrum = reducible && hyperplanes.iter().all(|&h| h);
    let flags = tuple.flags();
    let consistent = commute == reducible && reducible == hyperplane_spectrum;
    let non_normal_gap = !flags.all_normal && !commute && reducible && hyperplane_spectrum;
    let violation = (flags.all_normal && !consistent) || (commute && !hyperplane_spectrum);
    Ok(EquivalenceReport {
        direct,
        relative_commutator,
        commute,
        verdict: f.verdict,
        residual: f.residual,
        factors: f.factors,
        reducible,
        hyperplanes,
        hyperplane_witness_ratios: checks.iter().map(|c| c.1).collect(),
        hyperplane_spectrum,
        all_normal: flags.all_normal,
        all_selfadjoint: flags.all_selfadjoint,
        consistent,
        non_normal_gap,
        violation,
    })
}

/// `(M + M*, i(M − M*))`, both self-adjoint.
pub fn hermitian_parts(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let adj = m.adjoint();
    (m + &adj, (m - &adj).scale(Complex64::i()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalityReport {
    /// Reducibility of `σ_p(A + A*, i(A − A*))`.
    pub normal_by_spectrum: bool,
    /// `‖AA* − A*A‖ ≤ tol·‖A‖²`.
    pub normal_direct: bool,
    /// `‖AA* − A*A‖ / ‖A‖²`.
    pub direct_residual: f64,
    pub agree: bool,
    /// `None` for the zero matrix.
    pub pair: Option<EquivalenceReport>,
}

/// Normality of `A` read off the joint spectrum of its Hermitian parts.
pub fn normality_test(a: &ComplexMatrix, cfg: &EquivalenceConfig) -> Result<NormalityReport> {
    let norm = a.norm();
    if norm == 0.0 {
        return Ok(NormalityReport {
            normal_by_spectrum: true,
            normal_direct: true,
            direct_residual: 0.0,
            agree: true,
            pair: None,
        });
    }
    let direct_residual = a.normality_residual() / (norm * norm);
    let normal_direct = direct_residual <= cfg.tol;
    let (h1, h2) = hermitian_parts(a);
    let pair = equivalence_report(&OperatorTuple::pair(h1, h2)?, cfg)?;
    let normal_by_spectrum = pair.reducible;
    Ok(NormalityReport {
        normal_by_spectrum,
        normal_direct,
        direct_residual,
        agree: normal_by_spectrum == normal_direct,
        pair: Some(pair),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairTest {
    pub label: String,
    pub reducible: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompleteCommutativityReport {
    /// The pairs `(A ± A*, B ± B*)`, skew members multiplied by `i`.
    pub pairs: Vec<PairTest>,
    pub completely_commuting_by_spectrum: bool,
    /// `‖AB − BA‖ / (‖A‖‖B‖)`.
    pub commutator: f64,
    /// `‖AB* − B*A‖ / (‖A‖‖B‖)`.
    pub adjoint_commutator: f64,
    pub completely_commuting_direct: bool,
    pub agree: bool,
    /// Reducibility of the four-tuple `(A + A*, i(A − A*), B + B*, i(B − B*))`.
    pub normal_commuting_by_spectrum: bool,
    /// `A`, `B` normal and `AB = BA`, checked directly.
    pub normal_commuting_direct: bool,
    pub four_tuple_agree: bool,
}

fn pair_test(label: &str, a: ComplexMatrix, b: ComplexMatrix, cfg: &EquivalenceConfig) -> Result<PairTest> {
    if a.is_zero() && b.is_zero() {
        // det(I) = 1, the empty product
        return Ok(PairTest {
            label: label.into(),
            reducible: true,
            residual: 0.0,
        });
    }
    let t = OperatorTuple::pair(a, b)?;
    let f = factor_linear(&charpoly(&t)?, &cfg.factor_config())?;
    Ok(PairTest {
        label: label.into(),
        reducible: f.is_reducible(),
        residual: f.residual,
    })
}

/// Whether `A` commutes with both `B` and `B*`, decided through the four
/// self-adjoint pairs built from the Hermitian parts.
pub fn complete_commutativity_test(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    cfg: &EquivalenceConfig,
) -> Result<CompleteCommutativityReport> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let (a1, a2) = hermitian_parts(a);
    let (b1, b2) = hermitian_parts(b);
    let specs = [
        ("A+A*, B+B*", &a1, &b1),
        ("A+A*, i(B-B*)", &a1, &b2),
        ("i(A-A*), B+B*", &a2, &b1),
        ("i(A-A*), i(B-B*)", &a2, &b2),
    ];
    let pairs: Vec<PairTest> = specs
        .par_iter()
        .map(|(label, x, y)| pair_test(label, (*x).clone(), (*y).clone(), cfg))
        .collect::<Result<_>>()?;
    let completely_commuting_by_spectrum = pairs.iter().all(|p| p.reducible);

    let scale = (a.norm() * b.norm()).max(f64::MIN_POSITIVE);
    let commutator = commutator_norm(a, b)? / scale;
    let adjoint_commutator = commutator_norm(a, &b.adjoint())? / scale;
    let completely_commuting_direct = commutator <= cfg.tol && adjoint_commutator <= cfg.tol;

    let four = vec![a1, a2, b1, b2];
    let normal_commuting_by_spectrum = if four.iter().all(|m| m.is_zero()) {
        true
    } else {
        let t = OperatorTuple::new(four)?;
        factor_linear(&charpoly(&t)?, &cfg.factor_config())?.is_reducible()
    };
    let normal = |m: &ComplexMatrix| {
        let n = m.norm();
        m.normality_residual() <= cfg.tol * n * n
    };
    let normal_commuting_direct = normal(a) && normal(b) && commutator <= cfg.tol;
    Ok(CompleteCommutativityReport {
        pairs,
        completely_commuting_by_spectrum,
        commutator,
        adjoint_commutator,
        completely_commuting_direct,
        agree: completely_commuting_by_spectrum == completely_commuting_direct,
        normal_commuting_by_spectrum,
        normal_commuting_direct,
        four_tuple_agree: normal_commuting_by_spectrum == normal_commuting_direct,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharedEigenvector {
    pub x: Vec<Complex64>,
    /// `‖Ax − λx‖`.
    pub eigen_residual: f64,
    /// `|⟨Bx, x⟩ − μ|`.
    pub inner_residual: f64,
    /// `‖Bx − μx‖`, asserted only when `|μ| = ‖B‖`.
    pub b_residual: f64,
    pub b_eigenvector_asserted: bool,
}

/// A unit vector `x` with `Ax = λx` and `⟨Bx, x⟩ = μ` for a factor line
/// `1 + λz + μw = 0` of a pair with normal `A`.
///
/// Searches the `λ`-eigenspace `E` of `A`: among eigenvectors of the
/// compression of `B` to `E`, the one whose eigenvalue is nearest `μ`. When
/// `|μ| = ‖B‖`, `x` must also be an eigenvector of `B`. Residuals are
/// compared against `tol·max(1, ‖A‖)` and `tol·max(1, ‖B‖)`.
pub fn shared_eigenvector(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    factor: (Complex64, Complex64),
    tol: f64,
) -> Result<SharedEigenvector> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let (lambda, mu) = factor;
    let norm_a = a.norm();
    let norm_b = b.norm();
    let tol_a = tol * norm_a.max(1.0);
    let tol_b = tol * norm_b.max(1.0);
    let dec = eig_normal(a, tol.max(1e-12))?;
    let radius = grouping_threshold(norm_a).max(tol_a);
    let Some(k) = dec.cluster_near(lambda, radius) else {
        let dist = dec
            .clusters
            .iter()
            .map(|c| (c.value - lambda).norm())
            .fold(f64::INFINITY, f64::min);
        return Err(Error::NoSharedVector {
            eigen_residual: dist,
            inner_residual: f64::INFINITY,
        });
    };
    let basis = dec.cluster_basis(k);
    let m = b.compress(&basis);
    let s = schur(&m)?;
    let values = s.eigenvalues();
    let candidates: Vec<(Vec<Complex64>, f64, f64)> = (0..values.len())
        .map(|i| {
            let mut x = combine(&basis, &s.eigenvector(i));
            let nx = vec_norm(&x);
            for v in &mut x {
                *v /= nx;
            }
            let bx = b.mul_vec(&x);
            let br: f64 = bx.iter().zip(&x).map(|(p, q)| (p - mu * q).norm_sqr()).sum::<f64>().sqrt();
            (x, (values[i] - mu).norm(), br)
        })
        .collect();
    let nearest = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let tie = 1e-9 * (1.0 + mu.norm());
    let (x, _, b_residual) = candidates
        .into_iter()
        .filter(|c| c.1 <= nearest + tie)
        .min_by(|p, q| p.2.partial_cmp(&q.2).unwrap_or(Ordering::Equal))
        .expect("nonempty eigenspace");
    let ax = a.mul_vec(&x);
    let eigen_residual = ax
        .iter()
        .zip(&x)
        .map(|(p, q)| (p - lambda * q).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let inner_residual = (inner(&b.mul_vec(&x), &x) - mu).norm();
    let b_eigenvector_asserted = norm_b > 0.0 && (mu.norm() - norm_b).abs() <= tol_b;
    let ok = eigen_residual <= tol_a && inner_residual <= tol_b && (!b_eigenvector_asserted || b_residual <= tol_b);
    if !ok {
        return Err(Error::NoSharedVector {
            eigen_residual,
            inner_residual: inner_residual.max(if b_eigenvector_asserted { b_residual } else { 0.0 }),
        });
    }
    Ok(SharedEigenvector {
        x,
        eigen_residual,
        inner_residual,
        b_residual,
        b_eigenvector_asserted,
    })
}
