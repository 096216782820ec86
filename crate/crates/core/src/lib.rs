//! Joint spectra of tuples of complex matrices.
//!
//! For a tuple `𝔸 = (A₁, …, Aₙ)` of `N × N` matrices, the joint point
//! spectrum is the set of `z ∈ ℂⁿ` where `I + z₁A₁ + … + zₙAₙ` is singular,
//! the zero set of the characteristic polynomial
//! `p(z) = det(I + Σ z_k A_k)`. This crate computes `p`, decides whether it
//! splits into linear factors `1 + ⟨a_k, z⟩`, samples the spectrum, and checks
//! numerically how these properties relate to commutativity and normality.
//!
//! ```
//! use projspec::{charpoly, ComplexMatrix, OperatorTuple};
//! use projspec::factor::{factor_linear, FactorConfig};
//!
//! let a = ComplexMatrix::from_real_diag(&[1.0, 2.0]);
//! let b = ComplexMatrix::from_real_rows(&[&[3.0, 0.0], &[4.0, 5.0]])?;
//! let tuple = OperatorTuple::pair(a, b)?;
//!
//! // (1 + z + 3w)(1 + 2z + 5w), although A and B do not commute
//! let p = charpoly(&tuple)?;
//! let f = factor_linear(&p, &FactorConfig::default())?;
//! assert!(f.is_reducible());
//! assert!(tuple.max_relative_commutator() > 0.1);
//! # Ok::<(), projspec::Error>(())
//! ```
//!
//! Modules:
//!
//! - [`matrix`]: dense complex matrices and validated tuples.
//! - [`linalg`]: determinants, Schur form, singular values, normal eigendecompositions.
//! - [`poly`]: sparse multivariate polynomials, characteristic polynomials, roots.
//! - [`factor`]: linear factor extraction and the closed-form 2×2 test.
//! - [`spectra`]: membership, hyperplane checks, curve sampling, changes of variables.
//! - [`commute`]: joint diagonalization and the equivalence reports.
//! - [`perturb`]: Riesz projections and first-order eigenvalue perturbation.
//! - [`random`]: seeded generators for structured tuples.

pub mod commute;
pub mod error;
pub mod factor;
pub mod linalg;
pub mod matrix;
pub mod perturb;
pub mod poly;
pub mod random;
pub mod spectra;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, OperatorTuple, TupleFlags};
pub use num_complex::Complex64;
pub use poly::{charpoly, MultiPoly};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/charpoly.md")]
    mod charpoly {}
    #[doc = include_str!("../../../book/src/factoring.md")]
    mod factoring {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/commutativity.md")]
    mod commutativity {}
    #[doc = include_str!("../../../book/src/perturbation.md")]
    mod perturbation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
