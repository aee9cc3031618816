//! Exact and asymptotic fundamental limits of lossless compression for
//! finite-alphabet memoryless sources.
//!
//! Two families of quantities live here, with machinery to compare them:
//!
//! * **Exact finite-n limits**, computed with big-rational probabilities and
//!   big-integer counts: the fixed-length limit M*(n, eps), the one-to-one
//!   variable-length limit L*(eps | X^n), exact quantiles of the information
//!   density, and exact integrals of the M* step function.
//! * **Closed-form asymptotic expansions** of those limits: second/third
//!   order in the blocklength, moderate-deviations refinements where the
//!   error probability decays polynomially, and Bahadur–Rao strong
//!   large-deviations prefactors.
//!
//! The `checks` module wires the two together into the verification suites
//! exposed by the `vlc-limits` CLI (`describe`, `table`, `check`).

pub mod asymptotics;
pub mod bignum;
pub mod checks;
pub mod error;
pub mod exact;
pub mod gaussian;
pub mod large_dev;
pub mod md;
pub mod source;
pub mod table;

pub use error::{Error, Result};
pub use num_bigint::BigUint;
pub use num_rational::BigRational;
