//! Scored distributions and the eps-cutoff transformation.
//!
//! `ScoredDistribution` carries a finite real-valued random variable as
//! (value, exact probability) atoms. The eps-cutoff zeroes the largest
//! eps-probability mass, randomizing on the boundary atom; its expectation
//! is what the codelength formulas evaluate.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::bignum::ratio_f64;
use crate::error::{Error, Result};
use crate::exact::levels::{eps_parts, LevelDistribution};

/// Which base the information density is reported in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    Bits,
    Nats,
}

/// Finite real-valued random variable as sorted (value, probability) atoms.
///
/// Values are strictly increasing and probabilities are positive exact
/// rationals summing to 1.
#[derive(Debug, Clone)]
pub struct ScoredDistribution<V> {
    atoms: Vec<(V, BigRational)>,
}

impl<V: PartialOrd + Clone> ScoredDistribution<V> {
    pub fn new(atoms: Vec<(V, BigRational)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Domain("a distribution needs at least one atom".into()));
        }
        for w in atoms.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::Domain("atom values must be strictly increasing".into()));
            }
        }
        if atoms.iter().any(|(_, p)| !p.is_positive()) {
            return Err(Error::Domain("atom probabilities must be positive".into()));
        }
        let total: BigRational = atoms.iter().map(|(_, p)| p).sum();
        if !total.is_one() {
            return Err(Error::Domain(format!(
                "atom probabilities sum to {total}, expected exactly 1"
            )));
        }
        Ok(Self { atoms })
    }

    /// Atoms already known to satisfy the invariants (internal fast path).
    pub(crate) fn from_sorted_unchecked(atoms: Vec<(V, BigRational)>) -> Self {
        Self { atoms }
    }

    pub fn atoms(&self) -> &[(V, BigRational)] {
        &self.atoms
    }

    /// Solves the eps-cutoff: the (eta, beta) pair with
    /// P{Z > eta} + beta P{Z = eta} = eps, exactly.
    pub fn cutoff_solution(&self, eps: &BigRational) -> Result<CutoffSolution<V>> {
        eps_parts(eps)?; // range check
        if eps.is_zero() {
            return Ok(CutoffSolution::Identity);
        }
        if eps.is_one() {
            return Ok(CutoffSolution::Everything);
        }
        let mut tail = BigRational::zero();
        for (value, p) in self.atoms.iter().rev() {
            let with_atom = &tail + p;
            if &with_atom > eps {
                let beta = (eps - &tail) / p;
                return Ok(CutoffSolution::At {
                    eta: value.clone(),
                    beta,
                });
            }
            tail = with_atom;
        }
        // eps in [0,1) with total mass 1 always finds a boundary atom.
        unreachable!("cutoff boundary search exhausted the atom list");
    }
}

/// The boundary of an eps-cutoff transformation.
#[derive(Debug, Clone, PartialEq)]
pub enum CutoffSolution<V> {
    /// eps = 0: the identity transformation, nothing is cut.
    Identity,
    /// eps = 1: all mass is zeroed.
    Everything,
    /// Boundary atom `eta` with randomization weight `beta` in [0, 1):
    /// mass strictly above eta is cut, the atom itself keeps (1 - beta)
    /// of its mass.
    At { eta: V, beta: BigRational },
}

impl ScoredDistribution<i64> {
    /// E[<Z>_eps] as an exact rational (integer-valued atoms).
    pub fn cutoff_expectation_exact(&self, eps: &BigRational) -> Result<BigRational> {
        let sol = self.cutoff_solution(eps)?;
        Ok(self.cutoff_expectation_exact_with(&sol))
    }

    /// Exact expectation under an explicitly supplied cutoff solution.
    pub fn cutoff_expectation_exact_with(&self, sol: &CutoffSolution<i64>) -> BigRational {
        let value_term = |v: i64, p: &BigRational| BigRational::from(BigInt::from(v)) * p;
        match sol {
            CutoffSolution::Everything => BigRational::zero(),
            CutoffSolution::Identity => self
                .atoms
                .iter()
                .map(|(v, p)| value_term(*v, p))
                .sum(),
            CutoffSolution::At { eta, beta } => {
                let mut acc = BigRational::zero();
                for (v, p) in &self.atoms {
                    if v < eta {
                        acc += value_term(*v, p);
                    } else if v == eta {
                        acc += value_term(*v, p) * (BigRational::one() - beta);
                    } else {
                        break;
                    }
                }
                acc
            }
        }
    }

    /// Float view of the exact cutoff expectation.
    pub fn cutoff_expectation(&self, eps: &BigRational) -> Result<f64> {
        Ok(ratio_f64(&self.cutoff_expectation_exact(eps)?))
    }
}

impl ScoredDistribution<f64> {
    /// E[<Z>_eps] with exact probabilities and float atom values.
    pub fn cutoff_expectation(&self, eps: &BigRational) -> Result<f64> {
        let sol = self.cutoff_solution(eps)?;
        Ok(self.cutoff_expectation_with(&sol))
    }

    /// Expectation under an explicitly supplied cutoff solution.
    pub fn cutoff_expectation_with(&self, sol: &CutoffSolution<f64>) -> f64 {
        match sol {
            CutoffSolution::Everything => 0.0,
            CutoffSolution::Identity => self
                .atoms
                .iter()
                .map(|(v, p)| v * ratio_f64(p))
                .sum(),
            CutoffSolution::At { eta, beta } => {
                let mut acc = 0.0;
                for (v, p) in &self.atoms {
                    if v < eta {
                        acc += v * ratio_f64(p);
                    } else if v == eta {
                        acc += v * ratio_f64(p) * (1.0 - ratio_f64(beta));
                    } else {
                        break;
                    }
                }
                acc
            }
        }
    }
}

impl LevelDistribution {
    /// Distribution of Z = floor(log2 of the rank of X^n) in the
    /// probability-decreasing ordering of sequences.
    ///
    /// Rank blocks are split at powers of two by integer bit length, so no
    /// per-rank work happens even when counts reach |supp|^n.
    pub fn rank_log_floor_dist(&self) -> ScoredDistribution<i64> {
        let mut acc: Vec<(i64, BigUint)> = Vec::new();
        let mut rank_before = BigUint::zero();
        for level in self.levels() {
            let first = &rank_before + 1u32;
            let last = &rank_before + &level.count;
            let mut bl = first.bits();
            while bl <= last.bits() {
                // ranks with bit length bl: [2^(bl-1), 2^bl - 1]
                let lo_pow = BigUint::one() << (bl - 1);
                let hi_pow = (BigUint::one() << bl) - 1u32;
                let lo = if first > lo_pow { first.clone() } else { lo_pow };
                let hi = if last < hi_pow { last.clone() } else { hi_pow };
                let cnt = &hi - &lo + 1u32;
                let mass = cnt * &level.numer;
                let value = (bl - 1) as i64;
                match acc.last_mut() {
                    Some((v, m)) if *v == value => *m += mass,
                    _ => acc.push((value, mass)),
                }
                bl += 1;
            }
            rank_before = last;
        }
        let denom = BigInt::from(self.denom().clone());
        let atoms = acc
            .into_iter()
            .map(|(v, mass)| {
                (
                    v,
                    BigRational::new_raw(BigInt::from(mass), denom.clone()),
                )
            })
            .collect();
        ScoredDistribution::from_sorted_unchecked(atoms)
    }

    /// Distribution of the information density of X^n, optionally centered
    /// by n*H (pass the source entropy in bits).
    pub fn info_density_dist(
        &self,
        base: LogBase,
        center_entropy_bits: Option<f64>,
    ) -> ScoredDistribution<f64> {
        let scale = match base {
            LogBase::Bits => 1.0,
            LogBase::Nats => std::f64::consts::LN_2,
        };
        let shift = center_entropy_bits.map_or(0.0, |h| self.n() as f64 * h * scale);
        let denom = BigInt::from(self.denom().clone());
        let mut atoms: Vec<(f64, BigRational)> = Vec::with_capacity(self.levels().len());
        for (i, level) in self.levels().iter().enumerate() {
            let value = self.iota_bits(i) * scale - shift;
            let mass = &level.numer * &level.count;
            let p = BigRational::new_raw(BigInt::from(mass), denom.clone());
            match atoms.last_mut() {
                // distinct rationals can collide in f64 after the log;
                // merge to preserve strict monotonicity
                Some((v, q)) if *v >= value => *q += p,
                _ => atoms.push((value, p)),
            }
        }
        ScoredDistribution::from_sorted_unchecked(atoms)
    }
}
