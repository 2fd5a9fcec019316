//! Exact pure significance tests for multinomial and binomial
//! distributions, tested against the uniform distribution on the integer
//! simplex.
//!
//! All probabilities are exact rationals ([`Rational`]). Values of `p` at
//! which two binomial masses tie are generally irrational; those are carried
//! as [`AlgebraicOdds`] (`t = p/(1-p) = base^(1/d)`) and compared exactly.
//!
//! Pure field arithmetic (pmf evaluation, majorization, T-transforms) is
//! generic over [`scalar::Scalar`] and can also be run in [`Real`] for quick
//! exploration; anything that decides a tie stays in [`Rational`].

pub mod binomial;
pub mod error;
pub mod exactnum;
pub mod glrt;
pub mod majorization;
pub mod obd;
pub mod pst;
pub mod repeated;
pub mod report;
pub mod scalar;
pub mod simplex;
pub mod verify;

/// Exact rational used for every probability, p-value and statistic.
pub type Rational = num_rational::BigRational;

/// Floating scalar for approximate evaluation and irrational quantities
/// such as KLD.
pub type Real = f64;

/// Arbitrary-precision integer.
pub type Integer = num_bigint::BigInt;

pub use error::{Error, Result};
pub use exactnum::{cmp_algebraic, compare_binomial_mass, odds_from_p, AlgebraicOdds, Odds};
pub use simplex::{CellCounts, PmfTable, ProbVector};
