//! Complex Schur decomposition `A = Q T Q*` by Householder reduction to
//! Hessenberg form followed by single-shift QR iteration with Givens
//! rotations. Handles every square complex matrix; for normal input the
//! triangular factor is diagonal up to rounding.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{vec_norm, ComplexMatrix, ONE, ZERO};

/// Iterations allowed per eigenvalue before giving up.
const ITERATIONS_PER_EIGENVALUE: usize = 60;

#[derive(Debug, Clone)]
pub struct Schur {
    /// Upper triangular factor.
    pub t: ComplexMatrix,
    /// Unitary factor; columns are Schur vectors.
    pub q: ComplexMatrix,
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.t.diagonal()
    }

    /// Frobenius norm of the strictly upper triangle of `T`.
    pub fn departure(&self) -> f64 {
        let n = self.t.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                s += self.t[(i, j)].norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Unit right eigenvector for the `k`-th diagonal entry of `T`, found by
    /// back substitution and mapped back through `Q`.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        let n = self.t.dim();
        let lambda = self.t[(k, k)];
        let tiny = f64::EPSILON * self.t.max_abs().max(f64::MIN_POSITIVE);
        let mut y = vec![ZERO; n];
        y[k] = ONE;
        for j in (0..k).rev() {
            let s: Complex64 = (j + 1..=k).map(|l| self.t[(j, l)] * y[l]).sum();
            let mut d = self.t[(j, j)] - lambda;
            if d.norm() < tiny {
                d = Complex64::new(tiny, 0.0);
            }
            y[j] = -s / d;
        }
        let mut x = self.q.mul_vec(&y);
        let nrm = vec_norm(&x);
        for v in &mut x {
            *v /= nrm;
        }
        x
    }
}

/// Givens rotation `G = [[c, s], [-conj(s), c]]` with real `c`, chosen so
/// that `G [x; y] = [r; 0]`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    if y == ZERO {
        return (1.0, ZERO);
    }
    let ax = x.norm();
    let r = ax.hypot(y.norm());
    if ax == 0.0 {
        return (0.0, y.conj() / y.norm());
    }
    let c = ax / r;
    let s = (x / ax) * y.conj() / r;
    (c, s)
}

fn rotate_rows(m: &mut ComplexMatrix, k: usize, c: f64, s: Complex64, cols: std::ops::Range<usize>) {
    for j in cols {
        let a = m[(k, j)];
        let b = m[(k + 1, j)];
        m[(k, j)] = a * c + s * b;
        m[(k + 1, j)] = -s.conj() * a + b * c;
    }
}

fn rotate_cols(m: &mut ComplexMatrix, k: usize, c: f64, s: Complex64, rows: std::ops::Range<usize>) {
    for i in rows {
        let a = m[(i, k)];
        let b = m[(i, k + 1)];
        m[(i, k)] = a * c + s.conj() * b;
        m[(i, k + 1)] = -s * a + b * c;
    }
}

/// Householder reduction to upper Hessenberg form, accumulating `Q`.
fn hessenberg(a: &mut ComplexMatrix, q: &mut ComplexMatrix) {
    let n = a.dim();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let xnorm = vec_norm(&v);
        if xnorm == 0.0 {
            continue;
        }
        let phase = if v[0].norm() > 0.0 { v[0] / v[0].norm() } else { ONE };
        v[0] += phase * xnorm;
        let vnorm = vec_norm(&v);
        if vnorm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        // rows k+1.. : A <- (I - 2vv*) A
        for j in 0..n {
            let mut dot = ZERO;
            for (idx, vi) in v.iter().enumerate() {
                dot += vi.conj() * a[(k + 1 + idx, j)];
            }
            for (idx, vi) in v.iter().enumerate() {
                a[(k + 1 + idx, j)] -= *vi * dot * 2.0;
            }
        }
        // columns k+1.. : A <- A (I - 2vv*), same for Q
        for m in [&mut *a, &mut *q] {
            for i in 0..n {
                let mut dot = ZERO;
                for (idx, vi) in v.iter().enumerate() {
                    dot += m[(i, k + 1 + idx)] * vi;
                }
                for (idx, vi) in v.iter().enumerate() {
                    m[(i, k + 1 + idx)] -= dot * vi.conj() * 2.0;
                }
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complete Schur decomposition of a square complex matrix.
pub fn schur(m: &ComplexMatrix) -> Result<Schur> {
    let n = m.dim();
    let mut t = m.clone();
    let mut q = ComplexMatrix::identity(n);
    if n == 0 {
        return Ok(Schur { t, q });
    }
    hessenberg(&mut t, &mut q);

    let scale = t.max_abs();
    if scale == 0.0 {
        return Ok(Schur { t, q });
    }
    let eps = f64::EPSILON;
    let cap = ITERATIONS_PER_EIGENVALUE * n.max(1);
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = t[(l - 1, l - 1)].norm() + t[(l, l)].norm();
            if s == 0.0 {
                s = scale;
            }
            if t[(l, l - 1)].norm() <= eps * s {
                t[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > cap {
            return Err(Error::NoConvergence { iterations: total });
        }
        let sigma = if since_deflation % 11 == 10 {
            // exceptional shift to break cycles
            t[(hi, hi)] + Complex64::new(0.75 * t[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                t[(hi - 1, hi - 1)],
                t[(hi - 1, hi)],
                t[(hi, hi - 1)],
                t[(hi, hi)],
            )
        };

        for k in l..=hi {
            t[(k, k)] -= sigma;
        }
        let mut rotations = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(t[(k, k)], t[(k + 1, k)]);
            rotate_rows(&mut t, k, c, s, k..n);
            t[(k + 1, k)] = ZERO;
            rotations.push((k, c, s));
        }
        for &(k, c, s) in &rotations {
            rotate_cols(&mut t, k, c, s, 0..(k + 2).min(hi + 1));
            rotate_cols(&mut q, k, c, s, 0..n);
        }
        for k in l..=hi {
            t[(k, k)] += sigma;
        }
    }
    for i in 1..n {
        for j in 0..i {
            t[(i, j)] = ZERO;
        }
    }
    Ok(Schur { t, q })
}

/// Eigenvalues of an arbitrary square matrix.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    Ok(schur(m)?.eigenvalues())
}
