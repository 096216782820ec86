//! Seeded random constructions used by the generators, the tests and the
//! acceptance suite. Everything here is deterministic for a fixed seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{inner, vec_norm, ComplexMatrix, OperatorTuple};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian, `E|z|² = 1`.
pub fn complex_gaussian(r: &mut impl Rng) -> Complex64 {
    let re: f64 = r.sample(StandardNormal);
    let im: f64 = r.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Uniform sample from the closed disk of the given radius.
pub fn disk_point(radius: f64, r: &mut impl Rng) -> Complex64 {
    let rho = radius * r.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * r.random::<f64>();
    Complex64::from_polar(rho, theta)
}

pub fn complex_gaussian_vector(n: usize, r: &mut impl Rng) -> Vec<Complex64> {
    (0..n).map(|_| complex_gaussian(r)).collect()
}

pub fn complex_gaussian_matrix(n: usize, r: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |_, _| complex_gaussian(r))
}

/// Haar-like random unitary: Gram–Schmidt (applied twice) on a Gaussian matrix.
pub fn random_unitary(n: usize, r: &mut impl Rng) -> ComplexMatrix {
    let g = complex_gaussian_matrix(n, r);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let h = inner(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= h * qi;
                }
            }
        }
        let nrm = vec_norm(&v);
        for vi in &mut v {
            *vi /= nrm;
        }
        cols.push(v);
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

pub fn conjugate(u: &ComplexMatrix, d: &ComplexMatrix) -> ComplexMatrix {
    &(u * d) * &u.adjoint()
}

/// `U diag(spectrum) U*` for a fresh random unitary `U`.
pub fn random_normal_with_spectrum(spectrum: &[Complex64], r: &mut impl Rng) -> ComplexMatrix {
    let u = random_unitary(spectrum.len(), r);
    conjugate(&u, &ComplexMatrix::from_diag(spectrum))
}

/// Normal matrix with complex Gaussian spectrum.
pub fn random_normal(n: usize, r: &mut impl Rng) -> ComplexMatrix {
    let spec = complex_gaussian_vector(n, r);
    random_normal_with_spectrum(&spec, r)
}

/// Hermitian matrix with standard normal real spectrum.
pub fn random_hermitian(n: usize, r: &mut impl Rng) -> ComplexMatrix {
    let spec: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(r.sample::<f64, _>(StandardNormal), 0.0))
        .collect();
    random_normal_with_spectrum(&spec, r)
}

/// A tuple of commuting normal matrices sharing one random unitary, together
/// with the joint eigenvalues: `diagonals[j][k]` is the `k`-th eigenvalue of
/// `A_j`.
#[derive(Debug, Clone)]
pub struct CommutingConstruction {
    pub tuple: OperatorTuple,
    pub unitary: ComplexMatrix,
    pub diagonals: Vec<Vec<Complex64>>,
}

impl CommutingConstruction {
    /// The joint eigenvalue vectors `(λ_{1k}, …, λ_{nk})`, one per `k`.
    pub fn joint_eigenvalues(&self) -> Vec<Vec<Complex64>> {
        let n = self.tuple.dim();
        (0..n)
            .map(|k| self.diagonals.iter().map(|d| d[k]).collect())
            .collect()
    }
}

pub fn commuting_from_diagonals(diagonals: Vec<Vec<Complex64>>, r: &mut impl Rng) -> CommutingConstruction {
    let n = diagonals[0].len();
    let unitary = random_unitary(n, r);
    let matrices = diagonals
        .iter()
        .map(|d| conjugate(&unitary, &ComplexMatrix::from_diag(d)))
        .collect();
    CommutingConstruction {
        tuple: OperatorTuple::new(matrices).expect("nonzero construction"),
        unitary,
        diagonals,
    }
}

/// Commuting normal `arity`-tuple of `dim × dim` matrices with Gaussian joint
/// eigenvalues.
pub fn commuting_normal(dim: usize, arity: usize, r: &mut impl Rng) -> CommutingConstruction {
    let diagonals = (0..arity).map(|_| complex_gaussian_vector(dim, r)).collect();
    commuting_from_diagonals(diagonals, r)
}

/// Same as [`commuting_normal`] with real joint eigenvalues (self-adjoint members).
pub fn commuting_hermitian(dim: usize, arity: usize, r: &mut impl Rng) -> CommutingConstruction {
    let diagonals = (0..arity)
        .map(|_| {
            (0..dim)
                .map(|_| Complex64::new(r.sample::<f64, _>(StandardNormal), 0.0))
                .collect()
        })
        .collect();
    commuting_from_diagonals(diagonals, r)
}

/// Normal matrices with independent eigenbases; generically non-commuting.
pub fn independent_normal(dim: usize, arity: usize, r: &mut impl Rng) -> OperatorTuple {
    OperatorTuple::new((0..arity).map(|_| random_normal(dim, r)).collect()).expect("nonzero construction")
}

/// Gaussian matrices without structure.
pub fn gaussian_tuple(dim: usize, arity: usize, r: &mut impl Rng) -> OperatorTuple {
    OperatorTuple::new((0..arity).map(|_| complex_gaussian_matrix(dim, r)).collect())
        .expect("nonzero construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let mut r = rng(0);
        for n in 1..10 {
            let u = random_unitary(n, &mut r);
            let e = &(&u.adjoint() * &u) - &ComplexMatrix::identity(n);
            assert!(e.max_abs() < 1e-14);
        }
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let a = commuting_normal(4, 3, &mut rng(7));
        let b = commuting_normal(4, 3, &mut rng(7));
        for (x, y) in a.tuple.matrices().iter().zip(b.tuple.matrices()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn commuting_construction_commutes() {
        let c = commuting_normal(5, 3, &mut rng(2));
        assert!(c.tuple.max_relative_commutator() < 1e-13);
        assert!(c.tuple.flags().all_normal);
        let h = commuting_hermitian(4, 2, &mut rng(2));
        assert!(h.tuple.flags().all_selfadjoint);
    }

    #[test]
    fn disk_points_stay_inside() {
        let mut r = rng(3);
        assert!((0..1000).all(|_| disk_point(2.0, &mut r).norm() <= 2.0));
    }
}
