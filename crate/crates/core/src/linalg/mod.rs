//! Dense spectral kernels: determinants, Schur and normal eigendecompositions,
//! singular values and commutators.

mod lu;
mod schur;
mod svd;

use std::cmp::Ordering;

use num_complex::Complex64;

pub use lu::{determinant, inverse, Lu};
pub use schur::{eigenvalues, schur, Schur};
pub use svd::{operator_norm, singular_values, smallest_singular_value};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// A group of numerically coincident eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenCluster {
    /// Mean of the member eigenvalues.
    pub value: Complex64,
    /// Column indices into [`SpectralDecomposition::basis`].
    pub columns: Vec<usize>,
}

impl EigenCluster {
    pub fn multiplicity(&self) -> usize {
        self.columns.len()
    }
}

/// Unitary eigendecomposition `M = U diag(λ) U*` of a normal matrix, with
/// eigenvalues grouped into clusters. Columns of `basis` belonging to one
/// cluster are contiguous; clusters are ordered by decreasing modulus.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<Complex64>,
    pub basis: ComplexMatrix,
    pub clusters: Vec<EigenCluster>,
}

impl SpectralDecomposition {
    pub fn multiplicities(&self) -> Vec<(Complex64, usize)> {
        self.clusters.iter().map(|c| (c.value, c.multiplicity())).collect()
    }

    /// Orthonormal basis vectors of the `k`-th eigenspace.
    pub fn cluster_basis(&self, k: usize) -> Vec<Vec<Complex64>> {
        self.clusters[k].columns.iter().map(|&j| self.basis.column(j)).collect()
    }

    /// Orthogonal projection onto the `k`-th eigenspace.
    pub fn projection(&self, k: usize) -> ComplexMatrix {
        let vs = self.cluster_basis(k);
        let n = self.basis.dim();
        ComplexMatrix::from_fn(n, |i, j| vs.iter().map(|v| v[i] * v[j].conj()).sum())
    }

    /// Index of the cluster nearest `lambda`, if within `radius`.
    pub fn cluster_near(&self, lambda: Complex64, radius: f64) -> Option<usize> {
        self.clusters
            .iter()
            .enumerate()
            .map(|(k, c)| (k, (c.value - lambda).norm()))
            .filter(|&(_, d)| d <= radius)
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
            .map(|(k, _)| k)
    }

    /// `M` rebuilt from the decomposition.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::from_diag(&self.eigenvalues);
        &(&self.basis * &d) * &self.basis.adjoint()
    }
}

/// Default absolute gap below which eigenvalues are treated as one.
pub fn grouping_threshold(norm: f64) -> f64 {
    (1e-6 * norm).max(1e-7)
}

/// Single-linkage grouping of values whose chains of pairwise gaps stay
/// within `gap`. Returns index groups in first-appearance order.
pub fn group_indices(values: &[Complex64], gap: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut j = i;
        while parent[j] != r {
            let next = parent[j];
            parent[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= gap {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

pub(crate) fn modulus_order(a: &Complex64, b: &Complex64) -> Ordering {
    b.norm()
        .partial_cmp(&a.norm())
        .unwrap_or(Ordering::Equal)
        .then(b.re.partial_cmp(&a.re).unwrap_or(Ordering::Equal))
        .then(b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal))
}

/// Eigendecomposition of a normal matrix with the default grouping gap.
pub fn eig_normal(m: &ComplexMatrix, tol: f64) -> Result<SpectralDecomposition> {
    eig_normal_grouped(m, tol, grouping_threshold(m.norm()))
}

/// Eigendecomposition of a normal matrix.
///
/// Fails with [`Error::NotNormal`] when `‖MM* − M*M‖ > tol·‖M‖²`, or when the
/// Schur factor is visibly non-diagonal.
pub fn eig_normal_grouped(m: &ComplexMatrix, tol: f64, gap: f64) -> Result<SpectralDecomposition> {
    let norm = m.norm();
    let residual = m.normality_residual();
    if residual > tol * norm * norm {
        return Err(Error::NotNormal {
            residual: residual / (norm * norm),
        });
    }
    let s = schur(m)?;
    // For a matrix that is normal within `tol`, the departure from normality
    // of its Schur factor is bounded by a multiple of sqrt(tol)·‖M‖.
    let allowed = (10.0 * tol.sqrt()).max(1e-10) * norm;
    if s.departure() > allowed {
        return Err(Error::NotNormal {
            residual: s.departure() / norm.max(f64::MIN_POSITIVE),
        });
    }
    let raw = s.eigenvalues();
    let mut groups: Vec<(Complex64, Vec<usize>)> = group_indices(&raw, gap)
        .into_iter()
        .map(|g| {
            let mean = g.iter().map(|&i| raw[i]).sum::<Complex64>() / g.len() as f64;
            (mean, g)
        })
        .collect();
    groups.sort_by(|a, b| modulus_order(&a.0, &b.0));

    let n = m.dim();
    let mut basis = ComplexMatrix::zeros(n);
    let mut eigenvalues = Vec::with_capacity(n);
    let mut clusters = Vec::with_capacity(groups.len());
    let mut col = 0;
    for (mean, members) in groups {
        let mut columns = Vec::with_capacity(members.len());
        for i in members {
            for r in 0..n {
                basis[(r, col)] = s.q[(r, i)];
            }
            eigenvalues.push(raw[i]);
            columns.push(col);
            col += 1;
        }
        clusters.push(EigenCluster { value: mean, columns });
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        basis,
        clusters,
    })
}

/// `‖AB − BA‖₂`.
pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    Ok((&(a * b) - &(b * a)).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_normal_with_spectrum, random_unitary, rng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_input() {
        let d = eig_normal(&ComplexMatrix::from_real_diag(&[1.0, 2.0]), 1e-12).unwrap();
        let mut ev: Vec<f64> = d.eigenvalues.iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(ev, vec![1.0, 2.0]);
        assert!((d.basis[(0, 0)].norm() - 1.0).abs() < 1e-15 || (d.basis[(1, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn counterexample_matrix_is_not_normal() {
        let b = ComplexMatrix::from_real_rows(&[&[3.0, 0.0], &[4.0, 5.0]]).unwrap();
        assert!(matches!(eig_normal(&b, 1e-7), Err(Error::NotNormal { .. })));
    }

    #[test]
    fn recovers_constructed_multiplicities() {
        let mut r = rng(4);
        let m = random_normal_with_spectrum(&[c(2.0, 0.0), c(2.0, 0.0), c(-1.0, 0.0)], &mut r);
        let d = eig_normal(&m, 1e-10).unwrap();
        assert_eq!(d.clusters.len(), 2);
        assert_eq!(d.clusters[0].multiplicity(), 2);
        assert!((d.clusters[0].value - c(2.0, 0.0)).norm() < 1e-12);
        assert_eq!(d.clusters[1].multiplicity(), 1);
        assert!((d.clusters[1].value - c(-1.0, 0.0)).norm() < 1e-12);
        let p = d.projection(0);
        assert!((p.trace() - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn decomposition_invariants_on_random_normals() {
        let mut r = rng(12);
        for n in 1..=8 {
            let spec: Vec<Complex64> = (0..n).map(|k| c(k as f64 - 2.5, (k * k) as f64 * 0.3)).collect();
            let m = random_normal_with_spectrum(&spec, &mut r);
            let d = eig_normal(&m, 1e-10).unwrap();
            let uu = &d.basis.adjoint() * &d.basis;
            assert!((&uu - &ComplexMatrix::identity(n)).norm() < 1e-9);
            let mu = &m * &d.basis;
            let ud = &d.basis * &ComplexMatrix::from_diag(&d.eigenvalues);
            assert!((&mu - &ud).norm() < 1e-8 * m.norm());
            let total: usize = d.clusters.iter().map(|c| c.multiplicity()).sum();
            assert_eq!(total, n);
        }
    }

    #[test]
    fn commutator_examples() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 2.0]);
        let b = ComplexMatrix::from_real_rows(&[&[3.0, 0.0], &[4.0, 5.0]]).unwrap();
        // AB - BA = [[0,0],[4,0]]
        assert!((commutator_norm(&a, &b).unwrap() - 4.0).abs() < 1e-12);
        let a2 = &a * &a;
        assert_eq!(commutator_norm(&a, &a2).unwrap(), 0.0);
        assert!(commutator_norm(&a, &ComplexMatrix::identity(3)).is_err());
        let mut r = rng(1);
        let u = random_unitary(4, &mut r);
        let d = ComplexMatrix::from_real_diag(&[1.0, 2.0, 3.0, 4.0]);
        let x = &(&u * &d) * &u.adjoint();
        assert!((commutator_norm(&x, &b_like(&u)).unwrap() - commutator_norm(&b_like(&u), &x).unwrap()).abs() < 1e-14);
    }

    fn b_like(u: &ComplexMatrix) -> ComplexMatrix {
        &(u * u) + &ComplexMatrix::identity(u.dim())
    }

    #[test]
    fn grouping_is_transitive() {
        let v = [c(0.0, 0.0), c(0.5, 0.0), c(1.0, 0.0), c(5.0, 0.0)];
        let g = group_indices(&v, 0.6);
        assert_eq!(g, vec![vec![0, 1, 2], vec![3]]);
    }
}
