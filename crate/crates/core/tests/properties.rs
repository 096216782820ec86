//! Cross-module invariants on seeded random inputs.

use num_complex::Complex64;
use proptest::prelude::*;

use projspec::commute::{equivalence_report, simultaneous_diagonalize, EquivalenceConfig};
use projspec::factor::{factor_linear, FactorConfig};
use projspec::perturb::{riesz_projection, ContourSpec, DEFAULT_NODES};
use projspec::random::{
    commuting_normal, complex_gaussian_matrix, complex_gaussian_vector, conjugate, gaussian_tuple, random_unitary, rng,
};
use projspec::spectra::{membership, transform_tuple, ChangeOfBasis};
use projspec::{charpoly, ComplexMatrix, MultiPoly, OperatorTuple};

/// Cofactor expansion along the first row; independent of the LU code.
fn cofactor_det(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    let mut total = Complex64::new(0.0, 0.0);
    for col in 0..n {
        let minor: Vec<Vec<Complex64>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| *x).collect())
            .collect();
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        total += m[0][col] * cofactor_det(&minor) * sign;
    }
    total
}

fn pencil_rows(t: &OperatorTuple, z: &[Complex64]) -> Vec<Vec<Complex64>> {
    let n = t.dim();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let id = if i == j { 1.0 } else { 0.0 };
                    t.matrices()
                        .iter()
                        .zip(z)
                        .fold(Complex64::new(id, 0.0), |acc, (m, zk)| acc + zk * m[(i, j)])
                })
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn charpoly_matches_cofactor_determinant(seed in 0u64..100_000, dim in 1usize..=4, arity in 1usize..=3) {
        let mut r = rng(seed);
        let t = gaussian_tuple(dim, arity, &mut r);
        let p = charpoly(&t).unwrap();
        prop_assert_eq!(p.constant_term(), Complex64::new(1.0, 0.0));
        prop_assert!(p.degree() as usize <= dim);
        for _ in 0..5 {
            let z = complex_gaussian_vector(arity, &mut r);
            let want = cofactor_det(&pencil_rows(&t, &z));
            let got = p.evaluate(&z).unwrap();
            prop_assert!((got - want).norm() <= 1e-9 * (1.0 + want.norm()), "{} vs {}", got, want);
        }
    }

    #[test]
    fn charpoly_is_unitarily_invariant(seed in 0u64..100_000, dim in 1usize..=4) {
        let mut r = rng(seed);
        let t = gaussian_tuple(dim, 2, &mut r);
        let u = random_unitary(dim, &mut r);
        let moved = OperatorTuple::new(t.matrices().iter().map(|m| conjugate(&u, m)).collect()).unwrap();
        let d = charpoly(&t).unwrap().max_coefficient_distance(&charpoly(&moved).unwrap());
        prop_assert!(d < 1e-9);
    }

    #[test]
    fn change_of_variables_pulls_back_the_polynomial(seed in 0u64..100_000, dim in 1usize..=4) {
        let mut r = rng(seed);
        let t = gaussian_tuple(dim, 2, &mut r);
        let cob = ChangeOfBasis::new(complex_gaussian_matrix(2, &mut r)).unwrap();
        let moved = transform_tuple(&t, &cob).unwrap();
        let (p, q) = (charpoly(&t).unwrap(), charpoly(&moved).unwrap());
        for _ in 0..5 {
            let w = complex_gaussian_vector(2, &mut r);
            let lhs = q.evaluate(&w).unwrap();
            let rhs = p.evaluate(&cob.map_point(&w)).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-8 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn commuting_normal_factors_are_joint_eigenvalues(seed in 0u64..100_000, dim in 1usize..=5, arity in 1usize..=3) {
        let mut r = rng(seed);
        let cons = commuting_normal(dim, arity, &mut r);
        let f = factor_linear(&charpoly(&cons.tuple).unwrap(), &FactorConfig::default()).unwrap();
        prop_assert!(f.is_reducible());
        // every joint eigenvalue vector is some recovered factor
        for joint in cons.joint_eigenvalues() {
            let best = f
                .factors
                .iter()
                .map(|fac| fac.coeffs.iter().zip(&joint).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
                .fold(f64::INFINITY, f64::min);
            prop_assert!(best < 1e-7);
        }
        // and the hyperplane points are in the spectrum
        for fac in &f.factors {
            let k = fac.coeffs.iter().position(|x| x.norm() > 1e-3).unwrap();
            let mut z = vec![Complex64::new(0.0, 0.0); arity];
            z[k] = -1.0 / fac.coeffs[k];
            prop_assert!(membership(&cons.tuple, &z, 1e-7).unwrap().member);
        }
    }

    #[test]
    fn product_of_linear_forms_round_trips(seed in 0u64..100_000, degree in 1usize..=5, arity in 1usize..=3) {
        let mut r = rng(seed);
        let forms: Vec<Vec<Complex64>> = (0..degree).map(|_| complex_gaussian_vector(arity, &mut r)).collect();
        let p = forms.iter().fold(MultiPoly::one(arity), |acc, a| acc.mul(&MultiPoly::linear_factor(a)));
        let f = factor_linear(&p, &FactorConfig::default()).unwrap();
        prop_assert!(f.is_reducible());
        prop_assert!(f.expand(arity).max_coefficient_distance(&p) < 1e-8 * (1.0 + p.max_abs_coefficient()));
    }

    #[test]
    fn diagonalization_reconstructs(seed in 0u64..100_000, dim in 1usize..=6, arity in 1usize..=3) {
        let mut r = rng(seed);
        let cons = commuting_normal(dim, arity, &mut r);
        let jd = simultaneous_diagonalize(&cons.tuple, 1e-7).unwrap();
        let uu = &jd.unitary.adjoint() * &jd.unitary;
        prop_assert!((&uu - &ComplexMatrix::identity(dim)).norm() < 1e-10);
        for (j, m) in cons.tuple.matrices().iter().enumerate() {
            prop_assert!((&jd.reconstruct(j) - m).norm() < 1e-9 * m.norm());
        }
    }

    #[test]
    fn riesz_trace_counts_enclosed_eigenvalues(seed in 0u64..100_000, dim in 1usize..=5) {
        let mut r = rng(seed);
        // well separated diagonal values, conjugated by a non-unitary similarity
        let values: Vec<Complex64> = (0..dim).map(|k| Complex64::new(k as f64, 0.3 * k as f64)).collect();
        let s = &ComplexMatrix::identity(dim) + &complex_gaussian_matrix(dim, &mut r).scale(Complex64::new(0.2, 0.0));
        let a = &(&s * &ComplexMatrix::from_diag(&values)) * &projspec::linalg::inverse(&s).unwrap();
        let k = (seed as usize) % dim;
        let spec = ContourSpec::new(values[k], 0.5, DEFAULT_NODES).unwrap();
        let rp = riesz_projection(&a, &spec).unwrap();
        prop_assert_eq!(rp.rank, 1);
        prop_assert!(rp.idempotency < 1e-8);
    }
}

#[test]
fn report_serializes_with_every_field() {
    let cons = commuting_normal(3, 2, &mut rng(11));
    let rep = equivalence_report(&cons.tuple, &EquivalenceConfig::default()).unwrap();
    let v = serde_json::to_value(&rep).unwrap();
    for key in ["commute", "reducible", "hyperplane_spectrum", "consistent", "non_normal_gap", "residual", "factors"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["verdict"], "reducible");
}
