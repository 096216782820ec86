//! Dense complex matrices and operator tuples.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square dense complex matrix, stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from rows, checking squareness and finiteness.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidInput("matrix has no rows".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            data.extend(row);
        }
        let m = Self { dim, data };
        if !m.is_finite() {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(m)
    }

    /// Convenience constructor for real matrices, mostly for fixtures.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Operator 2-norm (largest singular value).
    pub fn norm(&self) -> f64 {
        linalg::operator_norm(self)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| *z == ZERO)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length must match matrix dimension");
        self.data
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    /// Largest entry of the strictly lower triangle plus strictly upper triangle.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    /// `‖MM* − M*M‖₂`.
    pub fn normality_residual(&self) -> f64 {
        let a = self.adjoint();
        (&(self * &a) - &(&a * self)).norm()
    }

    /// `‖M − M*‖₂`.
    pub fn hermitian_residual(&self) -> f64 {
        (self - &self.adjoint()).norm()
    }

    pub fn is_normal(&self, tol: f64) -> bool {
        let n = self.norm();
        self.normality_residual() <= tol * n * n.max(f64::MIN_POSITIVE)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_residual() <= tol * self.norm().max(1.0)
    }

    /// Submatrix `Q* M Q` for a matrix `Q` whose columns are given.
    pub fn compress(&self, basis: &[Vec<Complex64>]) -> ComplexMatrix {
        let images: Vec<Vec<Complex64>> = basis.iter().map(|q| self.mul_vec(q)).collect();
        ComplexMatrix::from_fn(basis.len(), |i, j| inner(&images[j], &basis[i]))
    }
}

/// Hermitian inner product `⟨x, y⟩ = Σ x_i conj(y_i)`.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn vec_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions must agree");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions must agree");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions must agree");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale(-ONE)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for row in self.data.chunks(self.dim) {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Structural flags of a tuple, computed once with a fixed relative tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TupleFlags {
    pub all_selfadjoint: bool,
    pub all_normal: bool,
    pub tol: f64,
}

/// An ordered tuple `(A₁, …, Aₙ)` of same-size matrices, at least one nonzero.
#[derive(Debug, Clone)]
pub struct OperatorTuple {
    matrices: Vec<ComplexMatrix>,
    flags: TupleFlags,
}

impl OperatorTuple {
    pub const FLAG_TOL: f64 = 1e-9;
    /// Members with `‖A_k‖ ≤ NEGLIGIBLE · max_j ‖A_j‖` are rounding noise and
    /// count as zero in the structural checks.
    pub const NEGLIGIBLE: f64 = 1e-13;

    pub fn new(matrices: Vec<ComplexMatrix>) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::InvalidInput("operator tuple is empty".into()))?;
        let dim = first.dim();
        for m in &matrices {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: m.dim(),
                });
            }
            if !m.is_finite() {
                return Err(Error::InvalidInput("matrix has non-finite entries".into()));
            }
        }
        if matrices.iter().all(ComplexMatrix::is_zero) {
            return Err(Error::InvalidInput(
                "operator tuple needs at least one nonzero matrix".into(),
            ));
        }
        let max = matrices.iter().map(ComplexMatrix::norm).fold(0.0, f64::max);
        let live = |m: &&ComplexMatrix| m.norm() > Self::NEGLIGIBLE * max;
        let flags = TupleFlags {
            all_selfadjoint: matrices.iter().filter(live).all(|m| m.is_hermitian(Self::FLAG_TOL)),
            all_normal: matrices.iter().filter(live).all(|m| m.is_normal(Self::FLAG_TOL)),
            tol: Self::FLAG_TOL,
        };
        Ok(Self { matrices, flags })
    }

    pub fn pair(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        Self::new(vec![a, b])
    }

    pub fn arity(&self) -> usize {
        self.matrices.len()
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn get(&self, k: usize) -> &ComplexMatrix {
        &self.matrices[k]
    }

    pub fn flags(&self) -> TupleFlags {
        self.flags
    }

    /// The pencil `I + Σ z_k A_k`.
    pub fn pencil(&self, z: &[Complex64]) -> Result<ComplexMatrix> {
        if z.len() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                actual: z.len(),
            });
        }
        let n = self.dim();
        let mut m = ComplexMatrix::identity(n);
        for (zk, a) in z.iter().zip(&self.matrices) {
            if *zk == ZERO {
                continue;
            }
            for (dst, src) in m.data.iter_mut().zip(&a.data) {
                *dst += zk * src;
            }
        }
        Ok(m)
    }

    /// Operator norms of the members, in order.
    pub fn norms(&self) -> Vec<f64> {
        self.matrices.iter().map(ComplexMatrix::norm).collect()
    }

    /// Whether member `k` is negligible next to the largest member.
    pub fn is_negligible(&self, k: usize) -> bool {
        let max = self.norms().into_iter().fold(0.0, f64::max);
        self.matrices[k].norm() <= Self::NEGLIGIBLE * max
    }

    /// Largest pairwise commutator norm, relative to `‖A_i‖‖A_j‖`; negligible
    /// members are skipped.
    pub fn max_relative_commutator(&self) -> f64 {
        let norms = self.norms();
        let max = norms.iter().copied().fold(0.0, f64::max);
        let live = |k: usize| norms[k] > Self::NEGLIGIBLE * max;
        let mut worst: f64 = 0.0;
        for i in (0..self.arity()).filter(|&i| live(i)) {
            for j in (i + 1..self.arity()).filter(|&j| live(j)) {
                let c = linalg::commutator_norm(&self.matrices[i], &self.matrices[j])
                    .expect("tuple members share a dimension");
                worst = worst.max(c / (norms[i] * norms[j]));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn from_rows_rejects_ragged_and_nan() {
        assert!(ComplexMatrix::from_rows(vec![vec![ONE, ONE], vec![ONE]]).is_err());
        assert!(ComplexMatrix::from_rows(vec![vec![c(f64::NAN, 0.0)]]).is_err());
        assert!(ComplexMatrix::from_rows(vec![]).is_err());
    }

    #[test]
    fn tuple_rejects_all_zero_and_mixed_dims() {
        assert!(OperatorTuple::new(vec![ComplexMatrix::zeros(2)]).is_err());
        assert!(OperatorTuple::new(vec![ComplexMatrix::identity(2), ComplexMatrix::identity(3)]).is_err());
        assert!(OperatorTuple::new(vec![]).is_err());
    }

    #[test]
    fn pencil_is_affine() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 2.0]);
        let b = ComplexMatrix::from_real_rows(&[&[3.0, 0.0], &[4.0, 5.0]]).unwrap();
        let t = OperatorTuple::pair(a, b).unwrap();
        let p = t.pencil(&[c(-1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(p.diagonal(), vec![c(0.0, 0.0), c(-1.0, 0.0)]);
        assert!(t.pencil(&[ONE]).is_err());
    }

    #[test]
    fn rounding_noise_members_are_ignored() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, -1.0]]).unwrap();
        let noise = ComplexMatrix::from_fn(2, |i, j| c(1e-17 * (i + 2 * j + 1) as f64, 3e-17));
        let t = OperatorTuple::pair(a, noise).unwrap();
        assert!(t.is_negligible(1) && !t.is_negligible(0));
        assert_eq!(t.max_relative_commutator(), 0.0);
        assert!(t.flags().all_normal && t.flags().all_selfadjoint);
    }

    #[test]
    fn flags_detect_structure() {
        let h = ComplexMatrix::from_rows(vec![vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(2.0, 0.0)]]).unwrap();
        let b = ComplexMatrix::from_real_rows(&[&[3.0, 0.0], &[4.0, 5.0]]).unwrap();
        assert!(OperatorTuple::new(vec![h.clone()]).unwrap().flags().all_selfadjoint);
        let t = OperatorTuple::pair(h, b).unwrap();
        assert!(!t.flags().all_normal);
    }
}
