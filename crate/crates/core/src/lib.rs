//! Exact census of monic irreducible binomials `x^t - a` over `F_q`.
//!
//! * [`nt`]: factorization, totient, radicals.
//! * [`ff`]: finite fields, orders, the irreducibility criterion and a
//!   Rabin-test oracle.
//! * [`lattice`]: lattice points in tetrahedra and products of primes.
//! * [`census`]: `N_q(t)`, its partial sums, stratum decompositions,
//!   asymptotics and bounds.
//! * [`verify`]: the criterion / oracle / closed-form cross-check.

pub mod census;
pub mod error;
pub mod ff;
pub mod lattice;
pub mod nt;
pub mod verify;

pub use error::{Error, Result};
