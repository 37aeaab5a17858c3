//! Positivity hierarchy of linear maps between matrix algebras, with a
//! finite-dimensional realization of the modular-theoretic picture of
//! transposition and of bipartite natural cones.
//!
//! Every search returns a [`verdict::Verdict`]: either an exact violation
//! carrying a witness that can be re-evaluated, or evidence recording the
//! search budget that failed to find one.

pub mod choi;
pub mod cones;
pub mod error;
pub mod kpos;
pub mod matkernel;
pub mod modular;
pub mod par;
pub mod rng;
pub mod search;
pub mod verdict;

pub use error::{Error, Result};
pub use matkernel::ComplexMatrix;
pub use num_complex::Complex64;
pub use rng::Seed;
