//! Exact finite-n quantities: the level distribution of sequence
//! probabilities, M*, quantiles, cutoff expectations, L*, and the exact
//! step-function integrals.

mod cutoff;
mod integrals;
mod levels;
mod oracle;

pub use cutoff::{CutoffSolution, LogBase, ScoredDistribution};
pub use integrals::MstarTransform;
pub use levels::{Level, LevelDistribution, DEFAULT_BUDGET};
pub use oracle::brute_force_oracle;

use num_rational::BigRational;

use crate::error::Result;

impl LevelDistribution {
    /// L*(eps | X^n): the minimum average codeword length of one-to-one
    /// codes with error probability at most eps, as an exact rational.
    ///
    /// This is the cutoff expectation of floor(log2 of the sequence rank).
    /// It is nonincreasing in eps and reaches 0 at eps >= 1 - 2^(-n H_inf).
    pub fn l_star(&self, eps: &BigRational) -> Result<BigRational> {
        self.rank_log_floor_dist().cutoff_expectation_exact(eps)
    }
}
