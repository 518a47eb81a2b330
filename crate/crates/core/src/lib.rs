//! Linear algebra over F₂ for the congruent number problem.
//!
//! The crate turns the Legendre symbols among the prime factors of a
//! squarefree `n` into small F₂ matrices and reads off arithmetic data from
//! their determinants and coranks:
//!
//! * [`numtheory`]: smallest-prime-factor sieve, squarefree factorization and
//!   the additive Legendre symbol `(d/p)₊`.
//! * [`gf2`]: bit-packed matrices and vectors with rank, determinant, block
//!   assembly and index-set restriction.
//! * [`monsky`]: the per-`n` data `y`, `z`, `A`, Rédei determinants `g(n)`,
//!   the eight determinant forms `M_x` and 2-Selmer ranks.
//! * [`lfun`]: the recursive divisor sums `ℒ(n)` and `ℒ_x(n)` used as an
//!   independent check on `det M_x`.
//! * [`altsim`]: alternating-matrix ensembles, corank corrections, the limiting
//!   corank distribution, Markov chains, Monte Carlo and a class group oracle.
//! * [`density`]: range scans producing density reports and certified
//!   congruent numbers.

pub mod altsim;
pub mod density;
mod error;
pub mod gf2;
pub mod lfun;
pub mod monsky;
pub mod numtheory;

pub use error::{Error, Result};
