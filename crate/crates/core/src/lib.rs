//! Tolerant linear-isomorphism testing of Boolean functions over `F_2^n`.
//!
//! The crate is organised bottom-up:
//!
//! - [`f2`]: vectors and matrices over F2, enumeration of `GL_n(F_2)`.
//! - [`fourier`]: truth tables, exact Walsh-Hadamard spectra, plain, linear and
//!   affine distances.
//! - [`lp`]: the approximate spectral norm `||f||_{1,alpha}` as a linear program.
//! - [`sampler`]: sparse sign representations sampled from an approximating
//!   polynomial.
//! - [`protocol`]: the deterministic two-party protocol with bit-exact
//!   transcripts.
//! - [`query`]: the query-model tester and its coefficient sieve.
//! - [`corpus`]: generators, file formats and certified promise pairs.

pub mod corpus;
pub mod error;
pub mod f2;
pub mod fourier;
pub mod lp;
pub mod protocol;
pub mod query;
pub mod sampler;

pub use error::{Error, Result};

/// Exact rational used for distances and spectral norms.
pub type Rational = num_rational::Ratio<i64>;
