//! Factorization of the Riesz–Feller fractional quantum harmonic oscillator.
//!
//! The crate is layered bottom-up:
//!
//! - [`term_algebra`]: exact signed-power expressions in `k` with coefficients
//!   polynomial in the Lévy index α.
//! - [`hermite`]: the Riesz–Feller Hermite family from the creation-operator
//!   ladder, with a Rodrigues-type cross-check.
//! - [`spectral`]: k-space states, the Riesz–Feller symbol and local eigenvalues.
//! - [`operator`]: formal normal-ordered algebra of `x` and `D^β` words, used to
//!   verify the one- and two-index factorizations.
//! - [`special`]: Γ, generalized hypergeometric series and the tabulated x-space
//!   ground states.
//! - [`transform`]: numerical inverse Fourier transform and non-Gaussianity.
//! - [`validate`]: the end-to-end verification report.

pub mod error;
pub mod hermite;
pub mod operator;
pub mod rational;
pub mod special;
pub mod spectral;
pub mod term_algebra;
pub mod transform;
pub mod validate;

pub use error::{Error, Result};
pub use rational::{parse_rational, Rational};
pub use term_algebra::{AlphaPoly, FracExponent, KExpr, KTerm, SpecializedExpr};
