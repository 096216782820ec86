//! First-order perturbation of eigenvalues, checked three ways.
//!
//! For `A_ε = A + εB` with `A` normal and `λ` a simple eigenvalue with unit
//! eigenvector `v`, the eigenvalue moves with speed `⟨Bv, v⟩`. This module
//! measures that speed by finite differences of tracked eigenvalues
//! ([`eigenvalue_derivative`]), reads it off the tangent of the spectral curve
//! `z = φ(w)` of `det(I + zA + wB) = 0` through `(−1/λ, 0)` ([`tangent_mu`]),
//! and checks the first-order expansion of the Riesz projections
//! ([`projection_expansion_check`]).

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eig_normal, eigenvalues, grouping_threshold, Lu};
use crate::matrix::{inner, vec_norm, ComplexMatrix, OperatorTuple, ONE, ZERO};
use crate::poly::charpoly;
use crate::random::{complex_gaussian_vector, rng};

/// Default quadrature nodes.
pub const DEFAULT_NODES: usize = 64;
/// Eigenvalues closer than this fraction of the radius to the contour are
/// rejected.
const CONTOUR_MARGIN: f64 = 0.05;
/// Target size of the trapezoid error factor `ρᴹ`.
const QUADRATURE_TARGET: f64 = 1e-15;
/// Cap on the node count raised by [`QUADRATURE_TARGET`].
const MAX_NODES: usize = 4096;
/// Largest allowed distance of `trace(P)` from an integer.
const TRACE_TOL: f64 = 1e-4;
/// Smallest tracking step, relative to the full step.
const MIN_TRACK_FRACTION: f64 = 1.0 / 1024.0;

/// The circle `|u − center| = radius` with `nodes` equispaced quadrature
/// points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourSpec {
    pub center: Complex64,
    pub radius: f64,
    pub nodes: usize,
}

impl ContourSpec {
    pub fn new(center: Complex64, radius: f64, nodes: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!("contour radius must be positive, got {radius}")));
        }
        if nodes < 16 {
            return Err(Error::InvalidInput(format!("at least 16 quadrature nodes required, got {nodes}")));
        }
        Ok(Self { center, radius, nodes })
    }

    /// Circle around `λ` with radius half the gap to the nearest eigenvalue of
    /// `A` outside the cluster of `λ`, and [`DEFAULT_NODES`] nodes.
    pub fn around(a: &ComplexMatrix, lambda: Complex64) -> Result<Self> {
        let gap = grouping_threshold(a.norm()).max(1e-6 * (1.0 + lambda.norm()));
        let ev = eigenvalues(a)?;
        let nearest_inside = ev.iter().map(|x| (x - lambda).norm()).fold(f64::INFINITY, f64::min);
        if nearest_inside > gap {
            return Err(Error::NotAnEigenvalue(lambda));
        }
        let outside = ev
            .iter()
            .map(|x| (x - lambda).norm())
            .filter(|&d| d > gap)
            .fold(f64::INFINITY, f64::min);
        let radius = if outside.is_finite() {
            outside / 2.0
        } else {
            0.5 * (1.0 + lambda.norm())
        };
        Self::new(lambda, radius, DEFAULT_NODES)
    }

    fn node(&self, k: usize, nodes: usize) -> (Complex64, Complex64) {
        let e = Complex64::from_polar(1.0, TAU * k as f64 / nodes as f64);
        (self.center + e * self.radius, e * self.radius)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RieszProjection {
    pub p: ComplexMatrix,
    pub rank: usize,
    pub trace: Complex64,
    /// `‖P² − P‖`.
    pub idempotency: f64,
    /// `‖P − P*‖`; zero for orthogonal projections.
    pub asymmetry: f64,
}

/// Rejects contours too close to the spectrum and returns the node count to
/// use: the trapezoid error decays like `ρᴹ` with `ρ` the worst ratio of
/// eigenvalue distance to radius (inside) or its inverse (outside), so
/// `spec.nodes` is raised until `ρᴹ` reaches [`QUADRATURE_TARGET`].
fn check_contour(a: &ComplexMatrix, spec: &ContourSpec) -> Result<usize> {
    let mut rho: f64 = 0.0;
    for x in eigenvalues(a)? {
        let r = (x - spec.center).norm();
        let d = (r - spec.radius).abs();
        if d <= CONTOUR_MARGIN * spec.radius {
            return Err(Error::ContourThroughSpectrum { distance: d });
        }
        rho = rho.max(if r < spec.radius { r / spec.radius } else { spec.radius / r });
    }
    let needed = if rho > 0.0 {
        (QUADRATURE_TARGET.ln() / rho.ln()).ceil() as usize
    } else {
        0
    };
    Ok(spec.nodes.max(needed).min(MAX_NODES.max(spec.nodes)))
}

fn resolvent(a: &ComplexMatrix, u: Complex64) -> Result<ComplexMatrix> {
    let m = &ComplexMatrix::identity(a.dim()).scale(u) - a;
    let lu = Lu::new(&m);
    if lu.is_singular() {
        return Err(Error::ContourThroughSpectrum { distance: 0.0 });
    }
    lu.inverse()
}

/// `P = (1/2πi)∮ (uI − A)⁻¹ du` by the trapezoid rule on the contour.
pub fn riesz_projection(a: &ComplexMatrix, spec: &ContourSpec) -> Result<RieszProjection> {
    let nodes = check_contour(a, spec)?;
    let n = a.dim();
    let mut p = ComplexMatrix::zeros(n);
    for k in 0..nodes {
        let (u, w) = spec.node(k, nodes);
        p = &p + &resolvent(a, u)?.scale(w);
    }
    let p = p.scale(ONE / nodes as f64);
    let trace = p.trace();
    let rank = trace.re.round();
    if (trace - Complex64::new(rank, 0.0)).norm() > TRACE_TOL || rank < 0.0 {
        return Err(Error::RankMismatch { trace: trace.re });
    }
    let idempotency = (&(&p * &p) - &p).norm();
    let asymmetry = (&p - &p.adjoint()).norm();
    Ok(RieszProjection {
        p,
        rank: rank as usize,
        trace,
        idempotency,
        asymmetry,
    })
}

/// `T = (1/2πi)∮ (uI − A)⁻¹ B (uI − A)⁻¹ du`, the derivative of the Riesz
/// projection of `A + εB` at `ε = 0`.
pub fn first_order_term(a: &ComplexMatrix, b: &ComplexMatrix, spec: &ContourSpec) -> Result<ComplexMatrix> {
    let nodes = check_contour(a, spec)?;
    let mut t = ComplexMatrix::zeros(a.dim());
    for k in 0..nodes {
        let (u, w) = spec.node(k, nodes);
        let r = resolvent(a, u)?;
        t = &t + &(&(&r * b) * &r).scale(w);
    }
    Ok(t.scale(ONE / nodes as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbConfig {
    /// Agreement tolerance between the derivative estimates.
    pub tol: f64,
    /// Finite-difference ladder for `ε`, decreasing by factors of ten.
    pub epsilons: [f64; 3],
    /// Finite-difference ladder for `w` in [`tangent_mu`].
    pub w_steps: [f64; 2],
    /// Branch selection inside a multiple eigenvalue; defaults to the
    /// compression eigenvalue of largest modulus.
    pub branch: Option<Complex64>,
    /// Tolerance for the normality and self-adjointness preconditions.
    pub structure_tol: f64,
}

impl Default for PerturbConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            epsilons: [1e-3, 1e-4, 1e-5],
            w_steps: [1e-4, 1e-5],
            branch: None,
            structure_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationProbe {
    pub lambda: Complex64,
    pub multiplicity: usize,
    /// Unit vector selecting the branch.
    pub v: Vec<Complex64>,
    /// `⟨Bv, v⟩`.
    pub inner: Complex64,
    /// Richardson-extrapolated central difference.
    pub fd_derivative: Complex64,
    pub epsilons: [f64; 3],
    /// Central differences, one per `ε`.
    pub fd_estimates: [Complex64; 3],
    pub p0_rank: usize,
    pub p0_norm: f64,
    /// Projection of `A + ε₀B` on the same contour, `ε₀` the largest `ε`.
    pub p_eps_rank: usize,
    pub p_eps_norm: f64,
    pub discrepancy: f64,
    pub agreement: bool,
}

/// Follows one eigenvalue branch of `f(t)` from `t = 0` to `t = target`,
/// predicting with the last observed slope (`slope` initially) and halving the
/// step while the nearest two candidates are within a factor two.
fn track(
    f: &dyn Fn(f64) -> Result<Vec<Complex64>>,
    start: Complex64,
    slope: Complex64,
    target: f64,
    strict: bool,
) -> Result<Complex64> {
    let mut t = 0.0;
    let mut current = start;
    let mut slope = slope;
    let mut h = target;
    let min = target.abs() * MIN_TRACK_FRACTION;
    while (target - t).abs() > 0.0 {
        let step = if h.abs() >= (target - t).abs() { target - t } else { h };
        let predicted = current + slope * step;
        let mut d: Vec<(f64, Complex64)> = f(t + step)?.into_iter().map(|x| ((x - predicted).norm(), x)).collect();
        d.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));
        let ambiguous = strict && d.len() > 1 && d[1].0 <= 2.0 * d[0].0 + 1e-14 * (1.0 + predicted.norm());
        if ambiguous {
            h /= 2.0;
            if h.abs() < min {
                return Err(Error::TrackingLost);
            }
            continue;
        }
        let next = d[0].1;
        slope = (next - current) / step;
        current = next;
        t += step;
    }
    Ok(current)
}

/// `(100 D(h/10) − D(h)) / 99` applied level by level; central differences
/// have error expansions in even powers of `h`.
fn richardson(d: &[Complex64]) -> Complex64 {
    let mut level = d.to_vec();
    let mut factor = 100.0;
    while level.len() > 1 {
        level = level.windows(2).map(|w| (w[1] * factor - w[0]) / (factor - 1.0)).collect();
        factor *= 100.0;
    }
    level[0]
}

struct Branch {
    lambda: Complex64,
    multiplicity: usize,
    v: Vec<Complex64>,
    /// First-order slope used to pick the branch; `⟨Bv, v⟩`.
    slope: Complex64,
    /// Whether other branches share the slope.
    tied: bool,
}

fn select_branch(a: &ComplexMatrix, b: &ComplexMatrix, lambda: Complex64, cfg: &PerturbConfig) -> Result<Branch> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let dec = eig_normal(a, cfg.structure_tol)?;
    let radius = grouping_threshold(a.norm()).max(1e-6 * (1.0 + lambda.norm()));
    let k = dec.cluster_near(lambda, radius).ok_or(Error::NotAnEigenvalue(lambda))?;
    let basis = dec.cluster_basis(k);
    let multiplicity = basis.len();
    let lambda = dec.clusters[k].value;
    if multiplicity == 1 {
        let v = basis.into_iter().next().expect("one vector");
        let slope = inner(&b.mul_vec(&v), &v);
        return Ok(Branch {
            lambda,
            multiplicity,
            v,
            slope,
            tied: false,
        });
    }
    if !(a.is_hermitian(cfg.structure_tol) && b.is_hermitian(cfg.structure_tol)) {
        return Err(Error::MultiplicityRegimeViolation { multiplicity });
    }
    let m = b.compress(&basis);
    let cdec = eig_normal(&m, cfg.structure_tol)?;
    let c = match cfg.branch {
        Some(h) => cdec
            .clusters
            .iter()
            .enumerate()
            .min_by(|x, y| {
                (x.1.value - h)
                    .norm()
                    .partial_cmp(&(y.1.value - h).norm())
                    .unwrap_or(Ordering::Equal)
            })
            .map(|x| x.0)
            .expect("nonempty"),
        None => 0,
    };
    let y = cdec.basis.column(cdec.clusters[c].columns[0]);
    let mut v = vec![ZERO; a.dim()];
    for (q, yi) in basis.iter().zip(&y) {
        for (o, x) in v.iter_mut().zip(q) {
            *o += yi * x;
        }
    }
    let nv = vec_norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    Ok(Branch {
        lambda,
        multiplicity,
        slope: inner(&b.mul_vec(&v), &v),
        v,
        tied: cdec.clusters[c].multiplicity() > 1,
    })
}

/// `dλ_ε/dε` at `ε = 0` for `A_ε = A + εB`, against `⟨Bv, v⟩`.
///
/// `A` must be normal. A multiple eigenvalue is accepted only for
/// self-adjoint `A` and `B`; the branch is then the one leaving `λ` with
/// slope equal to an eigenvalue of the compression of `B` to the eigenspace.
/// Agreement within `cfg.tol` is reported in the probe, not enforced.
pub fn eigenvalue_derivative(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    lambda: Complex64,
    cfg: &PerturbConfig,
) -> Result<PerturbationProbe> {
    let br = select_branch(a, b, lambda, cfg)?;
    let spectrum = |t: f64| eigenvalues(&(a + &b.scale(Complex64::new(t, 0.0))));
    // a simple eigenvalue is followed without the first-order prediction
    let slope = if br.multiplicity == 1 { ZERO } else { br.slope };
    let mut fd = [ZERO; 3];
    for (i, &eps) in cfg.epsilons.iter().enumerate() {
        let plus = track(&spectrum, br.lambda, slope, eps, !br.tied)?;
        let minus = track(&spectrum, br.lambda, slope, -eps, !br.tied)?;
        fd[i] = (plus - minus) / (2.0 * eps);
    }
    let fd_derivative = richardson(&fd);

    let spec = ContourSpec::around(a, br.lambda)?;
    let p0 = riesz_projection(a, &spec)?;
    let a_eps = a + &b.scale(Complex64::new(cfg.epsilons[0], 0.0));
    let pe = riesz_projection(&a_eps, &spec)?;
    let discrepancy = (fd_derivative - br.slope).norm();
    Ok(PerturbationProbe {
        lambda: br.lambda,
        multiplicity: br.multiplicity,
        inner: br.slope,
        v: br.v,
        fd_derivative,
        epsilons: cfg.epsilons,
        fd_estimates: fd,
        p0_rank: p0.rank,
        p0_norm: p0.p.norm(),
        p_eps_rank: pe.rank,
        p_eps_norm: pe.p.norm(),
        discrepancy,
        agreement: discrepancy <= cfg.tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangentReport {
    pub lambda: Complex64,
    /// `−λ φ′(0)`.
    pub mu: Complex64,
    pub phi_prime: Complex64,
    /// `⟨Bv, v⟩` for the unit eigenvector `v` of `λ`.
    pub inner: Complex64,
    pub discrepancy: f64,
    pub agreement: bool,
}

/// Slope of the spectral curve through `(−1/λ, 0)`.
///
/// Near `w = 0` the curve `det(I + zA + wB) = 0` is a graph `z = φ(w)`, whose
/// points are `z = −1/ν` for eigenvalues `ν` of `(I + wB)⁻¹A` near `λ`. The
/// slope `φ′(0)` comes from Richardson-extrapolated central differences and
/// `μ = −λφ′(0)` is compared with `⟨Bv, v⟩`.
pub fn tangent_mu(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    lambda: Complex64,
    cfg: &PerturbConfig,
) -> Result<TangentReport> {
    if lambda.norm() <= grouping_threshold(a.norm()) {
        return Err(Error::InvalidInput("the tangent formula needs a nonzero eigenvalue".into()));
    }
    let br = select_branch(a, b, lambda, cfg)?;
    if br.multiplicity != 1 {
        return Err(Error::MultiplicityRegimeViolation {
            multiplicity: br.multiplicity,
        });
    }
    let lambda = br.lambda;

    let p = charpoly(&OperatorTuple::pair(a.clone(), b.clone())?)?;
    let z0 = [-ONE / lambda, ZERO];
    let dz = p.partial_derivative(0).evaluate(&z0)?;
    if dz.norm() <= 1e-10 * p.max_abs_coefficient() {
        return Err(Error::SingularPoint { derivative: dz.norm() });
    }

    let id = ComplexMatrix::identity(a.dim());
    let spectrum = |w: f64| -> Result<Vec<Complex64>> {
        let m = &id + &b.scale(Complex64::new(w, 0.0));
        let lu = Lu::new(&m);
        if lu.is_singular() {
            return Err(Error::TrackingLost);
        }
        eigenvalues(&(&lu.inverse()? * a))
    };
    let phi = |w: f64| -> Result<Complex64> {
        let nu = track(&spectrum, lambda, ZERO, w, true)?;
        Ok(-ONE / nu)
    };
    let mut d = [ZERO; 2];
    for (i, &h) in cfg.w_steps.iter().enumerate() {
        d[i] = (phi(h)? - phi(-h)?) / (2.0 * h);
    }
    let phi_prime = richardson(&d);
    let mu = -lambda * phi_prime;
    let discrepancy = (mu - br.slope).norm();
    Ok(TangentReport {
        lambda,
        mu,
        phi_prime,
        inner: br.slope,
        discrepancy,
        agreement: discrepancy <= cfg.tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionCheck {
    pub epsilon: f64,
    /// `‖P_ε − P₀ − εT‖`.
    pub residual: f64,
    pub rank: usize,
    /// `‖A_ε P_ε x − λ_ε P_ε x‖ / ‖x‖` for a random `x`, when one eigenvalue
    /// is enclosed.
    pub eigen_residual: Option<f64>,
}

/// Second-order remainder of the Riesz projection expansion on `spec`.
pub fn projection_expansion_check(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    spec: &ContourSpec,
    epsilon: f64,
) -> Result<ExpansionCheck> {
    let p0 = riesz_projection(a, spec)?;
    let t = first_order_term(a, b, spec)?;
    let a_eps = a + &b.scale(Complex64::new(epsilon, 0.0));
    let pe = riesz_projection(&a_eps, spec)?;
    let rem = &(&pe.p - &p0.p) - &t.scale(Complex64::new(epsilon, 0.0));
    let eigen_residual = if pe.rank == 1 {
        let lam = (&a_eps * &pe.p).trace();
        let x = complex_gaussian_vector(a.dim(), &mut rng(0x5eed));
        let px = pe.p.mul_vec(&x);
        let apx = a_eps.mul_vec(&px);
        let r: Vec<Complex64> = apx.iter().zip(&px).map(|(p, q)| p - lam * q).collect();
        Some(vec_norm(&r) / vec_norm(&x))
    } else {
        None
    };
    Ok(ExpansionCheck {
        epsilon,
        residual: rem.norm(),
        rank: pe.rank,
        eigen_residual,
    })
}
