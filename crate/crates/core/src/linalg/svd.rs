//! Singular values by one-sided (Hestenes) Jacobi rotations.
//!
//! The columns of a working copy are rotated pairwise until mutually
//! orthogonal; their norms are then the singular values. Small singular
//! values come out with absolute error near `eps·‖M‖`, which is what the
//! membership witnesses need.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, ZERO};

const MAX_SWEEPS: usize = 80;

/// All singular values, sorted in decreasing order.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = m.dim();
    // column-major working copy
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| m.column(j)).collect();
    let eps = f64::EPSILON;
    // columns below this norm are rounding noise; rotating them only
    // regenerates noise of the same size
    let negligible = (eps * m.frobenius_norm()).powi(2);
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&cols[p], &cols[q]);
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = ZERO;
                    for (a, b) in cp.iter().zip(cq) {
                        alpha += a.norm_sqr();
                        beta += b.norm_sqr();
                        gamma += a.conj() * b;
                    }
                    (alpha, beta, gamma)
                };
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() || alpha.min(beta) <= negligible {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // rotate (a_p, conj(phase)·a_q), which have a real inner product
                let (left, right) = cols.split_at_mut(q);
                let cp = &mut left[p];
                let cq = &mut right[0];
                for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
                    let bq = *b * phase.conj();
                    let ap = *a;
                    *a = ap * c - bq * s;
                    *b = ap * s + bq * c;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: MAX_SWEEPS,
        });
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    Ok(sv)
}

/// `σ_min(M)`; zero exactly when `M` is singular, up to rounding.
pub fn smallest_singular_value(m: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(m)?.last().copied().unwrap_or(0.0))
}

/// Operator 2-norm, the largest singular value.
///
/// Falls back to the Frobenius norm in the (never observed) case of a
/// non-converging sweep, which is an upper bound.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    match singular_values(m) {
        Ok(sv) => sv.first().copied().unwrap_or(0.0),
        Err(_) => m.frobenius_norm(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::determinant;
    use crate::random::{complex_gaussian_matrix, random_unitary, rng};

    #[test]
    fn rank_one_converges() {
        let v = [Complex64::new(0.3, -1.0), Complex64::new(2.0, 0.5), Complex64::new(-0.7, 0.0)];
        let w = [Complex64::new(1.0, 1.0), Complex64::new(-0.2, 0.4), Complex64::new(0.0, 3.0)];
        let m = ComplexMatrix::from_fn(3, |i, j| v[i] * w[j].conj());
        let sv = singular_values(&m).unwrap();
        assert!(sv[2] < 1e-14 * sv[0]);
    }

    #[test]
    fn identity_and_zero_row() {
        assert!((smallest_singular_value(&ComplexMatrix::identity(3)).unwrap() - 1.0).abs() < 1e-15);
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!(smallest_singular_value(&m).unwrap() < 1e-8);
    }

    #[test]
    fn recovers_constructed_singular_values() {
        let mut r = rng(21);
        let u = random_unitary(5, &mut r);
        let v = random_unitary(5, &mut r);
        let s = [7.0, 3.0, 1.0, 1e-3, 1e-9];
        let m = &(&u * &ComplexMatrix::from_real_diag(&s)) * &v.adjoint();
        let sv = singular_values(&m).unwrap();
        for (got, want) in sv.iter().zip(s) {
            assert!((got - want).abs() < 1e-13 * 7.0, "{got} vs {want}");
        }
    }

    #[test]
    fn product_of_singular_values_is_abs_det() {
        let mut r = rng(8);
        for n in 1..7 {
            let m = complex_gaussian_matrix(n, &mut r);
            let prod: f64 = singular_values(&m).unwrap().iter().product();
            let det = determinant(&m).norm();
            assert!((prod - det).abs() <= 1e-11 * det.max(1.0));
        }
    }
}
