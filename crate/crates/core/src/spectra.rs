//! Queries on the joint point spectrum
//! `σ_p(A₁, …, Aₙ) = {z ∈ ℂⁿ : ker(I + Σ z_k A_k) ≠ 0}`.
//!
//! Membership is decided by the smallest singular value of the pencil, which
//! is reported alongside every verdict.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{determinant, smallest_singular_value, Lu};
use crate::matrix::{inner, vec_norm, ComplexMatrix, OperatorTuple, ZERO};
use crate::poly::{charpoly, roots_allowing_degree_drop, MultiPoly};
use crate::random::{disk_point, rng};

/// Default membership tolerance, before scaling by the pencil norm.
pub const DEFAULT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub z: Vec<Complex64>,
    /// `σ_min(I + Σ z_k A_k)`.
    pub witness: f64,
    /// `tol·(1 + Σ|z_k|‖A_k‖)`.
    pub threshold: f64,
    pub member: bool,
}

fn pencil_scale(tuple: &OperatorTuple, norms: &[f64], z: &[Complex64]) -> f64 {
    debug_assert_eq!(norms.len(), tuple.arity());
    1.0 + z.iter().zip(norms).map(|(x, n)| x.norm() * n).sum::<f64>()
}

pub fn membership(tuple: &OperatorTuple, z: &[Complex64], tol: f64) -> Result<SpectrumPoint> {
    membership_with_norms(tuple, &tuple.norms(), z, tol)
}

fn membership_with_norms(tuple: &OperatorTuple, norms: &[f64], z: &[Complex64], tol: f64) -> Result<SpectrumPoint> {
    let pencil = tuple.pencil(z)?;
    let witness = smallest_singular_value(&pencil)?;
    let threshold = tol * pencil_scale(tuple, norms, z);
    Ok(SpectrumPoint {
        z: z.to_vec(),
        witness,
        threshold,
        member: witness <= threshold,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperplaneMembership {
    pub contained: bool,
    pub max_witness: f64,
    /// Largest `witness / threshold` over the samples.
    pub max_witness_ratio: f64,
    /// Largest `|p(z)| / (1 + Σ|z_k|‖A_k‖)^N` over the samples.
    pub max_remainder: f64,
    pub samples: usize,
}

/// Orthonormal basis of `{v : Σ a_k v_k = 0}`, the Hermitian complement of `ā`.
fn complement_basis(a: &[Complex64]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    let abar: Vec<Complex64> = a.iter().map(|x| x.conj()).collect();
    let nrm = vec_norm(&abar);
    let mut basis: Vec<Vec<Complex64>> = vec![abar.iter().map(|x| x / nrm).collect()];
    for k in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = vec![ZERO; n];
        v[k] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for q in &basis {
                let h = inner(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= h * qi;
                }
            }
        }
        let vn = vec_norm(&v);
        if vn > 1e-8 {
            basis.push(v.into_iter().map(|x| x / vn).collect());
        }
    }
    basis.remove(0);
    basis
}

/// Random points `z* + Σ t_i v_i` on `{z : 1 + ⟨a, z⟩ = 0}`, with
/// `z* = −ā/‖a‖²` and `t_i` uniform in the disk of radius 2.
pub fn hyperplane_points(a: &[Complex64], samples: usize, seed: u64) -> Result<Vec<Vec<Complex64>>> {
    let nrm = vec_norm(a);
    if nrm == 0.0 || a.is_empty() {
        return Err(Error::ZeroNormal);
    }
    let base: Vec<Complex64> = a.iter().map(|x| -x.conj() / (nrm * nrm)).collect();
    let basis = complement_basis(a);
    let mut r = rng(seed);
    Ok((0..samples)
        .map(|_| {
            let mut z = base.clone();
            for v in &basis {
                let t = disk_point(2.0, &mut r);
                for (zi, vi) in z.iter_mut().zip(v) {
                    *zi += t * vi;
                }
            }
            z
        })
        .collect())
}

/// Sampled test of `{1 + ⟨a, z⟩ = 0} ⊂ σ_p`.
///
/// Every sample must pass [`membership`], and the determinant (the value of
/// the characteristic polynomial, hence its remainder modulo the factor on
/// the plane) must be small relative to `(1 + Σ|z_k|‖A_k‖)^N`.
pub fn hyperplane_membership(
    tuple: &OperatorTuple,
    a: &[Complex64],
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<HyperplaneMembership> {
    if a.len() != tuple.arity() {
        return Err(Error::ArityMismatch {
            expected: tuple.arity(),
            actual: a.len(),
        });
    }
    let points = hyperplane_points(a, samples, seed)?;
    let norms = tuple.norms();
    let mut out = HyperplaneMembership {
        contained: true,
        max_witness: 0.0,
        max_witness_ratio: 0.0,
        max_remainder: 0.0,
        samples,
    };
    for z in &points {
        let sp = membership_with_norms(tuple, &norms, z, tol)?;
        let det = determinant(&tuple.pencil(z)?).norm();
        let remainder = det / pencil_scale(tuple, &norms, z).powi(tuple.dim() as i32);
        out.max_witness = out.max_witness.max(sp.witness);
        out.max_witness_ratio = out.max_witness_ratio.max(sp.witness / sp.threshold);
        out.max_remainder = out.max_remainder.max(remainder);
        out.contained &= sp.member && remainder <= tol;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRoot {
    pub z: Complex64,
    /// `|det(I + zA + wB)|`.
    pub residual: f64,
    pub multiplicity: usize,
}

impl CurveRoot {
    pub fn is_multiple(&self) -> bool {
        self.multiplicity > 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSlice {
    pub w: Complex64,
    pub roots: Vec<CurveRoot>,
    /// Degree lost at this `w` to a vanishing leading coefficient.
    pub at_infinity: usize,
}

/// Points of `σ_p(A, B)` above a grid of `w` values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSample {
    pub slices: Vec<CurveSlice>,
}

impl CurveSample {
    pub const CSV_HEADER: &'static str = "w_re,w_im,z_re,z_im,residual,multiple_flag";

    /// One row per `(w, root)`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for slice in &self.slices {
            for r in &slice.roots {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    csv_number(slice.w.re),
                    csv_number(slice.w.im),
                    csv_number(r.z.re),
                    csv_number(r.z.im),
                    csv_number(r.residual),
                    u8::from(r.is_multiple())
                ));
            }
        }
        s
    }

    pub fn points(&self) -> impl Iterator<Item = (Complex64, &CurveRoot)> {
        self.slices.iter().flat_map(|s| s.roots.iter().map(move |r| (s.w, r)))
    }
}

/// For each `w`, all roots `z` of `det(I + zA + wB)`.
pub fn sample_curve(a: &ComplexMatrix, b: &ComplexMatrix, w_grid: &[Complex64]) -> Result<CurveSample> {
    let tuple = OperatorTuple::pair(a.clone(), b.clone())?;
    let p = charpoly(&tuple)?;
    let mut slices = Vec::with_capacity(w_grid.len());
    for &w in w_grid {
        let q = p.restrict_to_line(&[ZERO, w], &[Complex64::new(1.0, 0.0), ZERO])?;
        let found = roots_allowing_degree_drop(&q)?;
        let roots = found
            .roots
            .iter()
            .map(|r| {
                Ok(CurveRoot {
                    z: r.value,
                    residual: determinant(&tuple.pencil(&[r.value, w])?).norm(),
                    multiplicity: r.multiplicity,
                })
            })
            .collect::<Result<_>>()?;
        slices.push(CurveSlice {
            w,
            roots,
            at_infinity: found.at_infinity,
        });
    }
    Ok(CurveSample { slices })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    Regular,
    Singular,
    OffVariety,
}

/// Regular or singular point of `{p = 0}`, with exact partial derivatives.
pub fn classify_point(p: &MultiPoly, z0: &[Complex64], tol: f64) -> Result<PointClass> {
    if p.evaluate(z0)?.norm() > tol {
        return Ok(PointClass::OffVariety);
    }
    let grad = p.gradient(z0)?;
    Ok(if grad.iter().all(|g| g.norm() <= tol) {
        PointClass::Singular
    } else {
        PointClass::Regular
    })
}

/// Shortest round-trip decimal for moderate magnitudes, scientific notation
/// otherwise; the number format of every CSV written by the crate.
pub fn csv_number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// An invertible `n × n` matrix `C` with its inverse.
#[derive(Debug, Clone)]
pub struct ChangeOfBasis {
    c: ComplexMatrix,
    inverse: ComplexMatrix,
}

impl ChangeOfBasis {
    pub fn new(c: ComplexMatrix) -> Result<Self> {
        let lu = Lu::new(&c);
        if lu.is_singular() {
            return Err(Error::SingularC { residual: f64::INFINITY });
        }
        let inverse = lu.inverse()?;
        let residual = (&(&c * &inverse) - &ComplexMatrix::identity(c.dim())).norm();
        if residual > 1e-10 {
            return Err(Error::SingularC { residual });
        }
        Ok(Self { c, inverse })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.c
    }

    pub fn inverse(&self) -> &ComplexMatrix {
        &self.inverse
    }

    /// The row vector `zC`.
    pub fn map_point(&self, z: &[Complex64]) -> Vec<Complex64> {
        let n = self.c.dim();
        (0..n).map(|j| (0..n).map(|i| z[i] * self.c[(i, j)]).sum()).collect()
    }

    /// Factor vector of the transformed tuple: `1 + ⟨a, zC⟩ = 1 + ⟨Ca, z⟩`.
    pub fn map_factor(&self, a: &[Complex64]) -> Vec<Complex64> {
        self.c.mul_vec(a)
    }
}

/// `B_i = Σ_j c_ij A_j`, so that `I + Σ z_i B_i = I + Σ (zC)_j A_j`.
pub fn transform_tuple(tuple: &OperatorTuple, c: &ChangeOfBasis) -> Result<OperatorTuple> {
    let n = tuple.arity();
    if c.c.dim() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            actual: c.c.dim(),
        });
    }
    let dim = tuple.dim();
    let matrices = (0..n)
        .map(|i| {
            (0..n).fold(ComplexMatrix::zeros(dim), |acc, j| {
                &acc + &tuple.get(j).scale(c.c[(i, j)])
            })
        })
        .collect();
    OperatorTuple::new(matrices)
}
