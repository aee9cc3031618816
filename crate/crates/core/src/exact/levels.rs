//! Exact distribution of sequence probabilities of X^n by type class.
//!
//! Every sequence in a type class shares one probability, so the full
//! distribution of P_{X^n}(X^n) compresses to a short list of levels
//! (per-sequence probability, multiplicity). All probabilities live over the
//! common denominator d^n, where d is the lcm of the pmf denominators; the
//! hot paths below therefore run entirely on big integers, with no rational
//! normalization.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::bignum::{big_log2, big_ratio_f64, ceil_div};
use crate::error::{Error, Result};
use crate::source::{DiscreteSource, InfoMoments};

/// Default cap on the number of type classes enumerated.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// One probability level: `count` sequences each of probability
/// `numer / denom` (the denominator lives on [`LevelDistribution`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub numer: BigUint,
    pub count: BigUint,
}

/// Sorted distinct sequence-probability levels of X^n.
///
/// Levels are strictly descending in probability, i.e. ascending in
/// information density. Invariants: sum(count * numer) = denom and
/// sum(count) = |supp|^n, both exactly.
#[derive(Debug, Clone)]
pub struct LevelDistribution {
    n: u32,
    denom: BigUint,
    levels: Vec<Level>,
}

impl LevelDistribution {
    /// Enumerates all type classes of X^n and merges equal-probability types.
    ///
    /// Errors with the required count when the number of compositions
    /// C(n+m-1, m-1) exceeds `budget`.
    pub fn enumerate(src: &DiscreteSource, n: u32, budget: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("blocklength n must be >= 1".into()));
        }
        let m = src.support_size();
        let classes = compositions_count(n, m);
        if classes > BigUint::from(budget) {
            return Err(Error::BudgetExceeded {
                required: classes,
                budget,
            });
        }
        let (weights, d) = src.scaled_weights();
        let mut merged: BTreeMap<BigUint, BigUint> = BTreeMap::new();
        descend(&weights, 0, n, BigUint::one(), BigUint::one(), &mut merged);
        let denom = d.pow(n);
        let levels = merged
            .into_iter()
            .rev()
            .map(|(numer, count)| Level { numer, count })
            .collect();
        Ok(Self { n, denom, levels })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Common denominator of all per-sequence probabilities (d^n).
    pub fn denom(&self) -> &BigUint {
        &self.denom
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Per-sequence probability of level `i` as an exact rational.
    pub fn prob(&self, i: usize) -> BigRational {
        BigRational::new(
            BigInt::from(self.levels[i].numer.clone()),
            BigInt::from(self.denom.clone()),
        )
    }

    /// Information density of level `i` in nats: -ln(numer/denom).
    pub fn iota_nats(&self, i: usize) -> f64 {
        self.iota_bits(i) * std::f64::consts::LN_2
    }

    /// Information density of level `i` in bits.
    pub fn iota_bits(&self, i: usize) -> f64 {
        big_log2(&self.denom) - big_log2(&self.levels[i].numer)
    }

    /// Total number of sequences, |supp|^n.
    pub fn total_count(&self) -> BigUint {
        self.levels.iter().map(|l| &l.count).sum()
    }

    /// M*(n, eps): minimum cardinality of a set of sequences whose total
    /// probability is at least 1 - eps. Exact tie handling: the boundary
    /// level contributes ceil(deficit / level probability) sequences.
    pub fn m_star(&self, eps: &BigRational) -> Result<BigUint> {
        let (e, f) = eps_parts(eps)?;
        if e == f {
            return Ok(BigUint::zero()); // eps = 1: the empty set suffices
        }
        let target = (&f - &e) * &self.denom; // compare masses scaled by f
        let mut below_scaled = BigUint::zero();
        let mut taken = BigUint::zero();
        for level in &self.levels {
            let mass_scaled = &level.numer * &level.count * &f;
            if &below_scaled + &mass_scaled >= target {
                let deficit = &target - &below_scaled;
                let per_seq = &level.numer * &f;
                return Ok(taken + ceil_div(&deficit, &per_seq));
            }
            below_scaled += mass_scaled;
            taken += &level.count;
        }
        Ok(taken)
    }

    /// Exact counts (#sequences with iota < eta, #sequences with iota = eta)
    /// for an externally supplied eta in nats. Equality is resolved against
    /// the level whose information density matches eta within 1e-12 relative.
    pub fn mu_counts(&self, eta_nats: f64) -> (BigUint, BigUint) {
        let mut below = BigUint::zero();
        let mut at = BigUint::zero();
        for (i, level) in self.levels.iter().enumerate() {
            let iota = self.iota_nats(i);
            let tol = 1e-12 * iota.abs().max(eta_nats.abs()).max(1.0);
            if (iota - eta_nats).abs() <= tol {
                at = level.count.clone();
                break;
            }
            if iota < eta_nats {
                below += &level.count;
            } else {
                break; // iota ascending: nothing further can be below
            }
        }
        (below, at)
    }

    /// Index of the quantile level: the first level (in ascending
    /// information density) where the cumulative probability reaches
    /// 1 - eps.
    pub fn eta_quantile_index(&self, eps: &BigRational) -> Result<usize> {
        let (e, f) = eps_parts(eps)?;
        if e.is_zero() || e == f {
            return Err(Error::Domain(
                "eta quantile requires 0 < eps < 1".into(),
            ));
        }
        let target = (&f - &e) * &self.denom;
        let mut cum_scaled = BigUint::zero();
        for (i, level) in self.levels.iter().enumerate() {
            cum_scaled += &level.numer * &level.count * &f;
            if cum_scaled >= target {
                return Ok(i);
            }
        }
        Ok(self.levels.len() - 1)
    }

    /// eta_n(eps): the smallest level value eta (nats) with
    /// P{iota <= eta} >= 1 - eps and P{iota < eta} < 1 - eps.
    pub fn eta_quantile(&self, eps: &BigRational) -> Result<f64> {
        Ok(self.iota_nats(self.eta_quantile_index(eps)?))
    }

    /// zeta_n(eps): exact quantile of the normalized centered information
    /// density (iota_n - n H ln2) / (sigma sqrt(n)), evaluated at the same
    /// level the eta quantile selects.
    pub fn zeta_quantile(&self, moments: &InfoMoments, eps: &BigRational) -> Result<f64> {
        if moments.varentropy <= 0.0 {
            return Err(Error::ZeroVarentropy("the normalized quantile zeta"));
        }
        let i = self.eta_quantile_index(eps)?;
        let ln2 = std::f64::consts::LN_2;
        let center = self.n as f64 * moments.entropy * ln2;
        let sigma = moments.varentropy.sqrt() * ln2;
        Ok((self.iota_nats(i) - center) / (sigma * (self.n as f64).sqrt()))
    }

    /// Probability mass of level `i` (count * per-sequence probability) as f64.
    pub fn level_mass_f64(&self, i: usize) -> f64 {
        let mass = &self.levels[i].numer * &self.levels[i].count;
        big_ratio_f64(&mass, &self.denom)
    }
}

/// Number of compositions of n into m nonnegative parts: C(n+m-1, m-1).
fn compositions_count(n: u32, m: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..(m - 1) as u64 {
        acc = acc * (n as u64 + 1 + i) / (i + 1);
    }
    acc
}

/// Depth-first enumeration over symbol counts. At symbol index `i` with
/// `remaining` slots, the running numerator is the product of assigned
/// weights and `mult` the product of binomials C(remaining, k) so far
/// (telescoping to the multinomial coefficient at the leaf).
fn descend(
    weights: &[BigUint],
    i: usize,
    remaining: u32,
    numer: BigUint,
    mult: BigUint,
    out: &mut BTreeMap<BigUint, BigUint>,
) {
    if i == weights.len() - 1 {
        let leaf_numer = numer * weights[i].pow(remaining);
        *out.entry(leaf_numer).or_default() += mult;
        return;
    }
    let mut pow = BigUint::one();
    let mut binom = BigUint::one();
    for k in 0..=remaining {
        descend(
            weights,
            i + 1,
            remaining - k,
            &numer * &pow,
            &mult * &binom,
            out,
        );
        if k < remaining {
            pow *= &weights[i];
            binom = binom * (remaining - k) / (k + 1);
        }
    }
}

/// Validates eps in [0, 1] and returns (numer, denom) as nonnegative integers.
pub(crate) fn eps_parts(eps: &BigRational) -> Result<(BigUint, BigUint)> {
    if eps.is_negative() || eps > &BigRational::one() {
        return Err(Error::EpsOutOfRange(eps.to_string()));
    }
    Ok((
        eps.numer().magnitude().clone(),
        eps.denom().magnitude().clone(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn bern(n: i64, d: i64) -> DiscreteSource {
        DiscreteSource::bernoulli(rat(n, d)).unwrap()
    }

    fn uni2() -> DiscreteSource {
        DiscreteSource::from_probs(vec![rat(1, 2), rat(1, 2)]).unwrap()
    }

    #[test]
    fn enumerate_bernoulli_quarter_n2() {
        // hand enumeration of the 4 sequences: 9/16, 3/16 x2, 1/16
        let ld = LevelDistribution::enumerate(&bern(1, 4), 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(ld.denom(), &BigUint::from(16u32));
        let got: Vec<(u64, u64)> = ld
            .levels()
            .iter()
            .map(|l| (l.numer.to_u64().unwrap(), l.count.to_u64().unwrap()))
            .collect();
        assert_eq!(got, vec![(9, 1), (3, 2), (1, 1)]);
    }

    #[test]
    fn enumerate_uniform_single_level() {
        let ld = LevelDistribution::enumerate(&uni2(), 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(ld.levels().len(), 1);
        assert_eq!(ld.levels()[0].count, BigUint::from(8u32));
        assert_eq!(ld.prob(0), rat(1, 8));
    }

    #[test]
    fn enumerate_n1_is_the_merged_pmf() {
        let src = DiscreteSource::from_probs(vec![rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap();
        let ld = LevelDistribution::enumerate(&src, 1, DEFAULT_BUDGET).unwrap();
        let got: Vec<(u64, u64)> = ld
            .levels()
            .iter()
            .map(|l| (l.numer.to_u64().unwrap(), l.count.to_u64().unwrap()))
            .collect();
        assert_eq!(got, vec![(2, 1), (1, 2)]);
    }

    #[test]
    fn mass_and_count_invariants() {
        for (src, n) in [
            (bern(3, 10), 17u32),
            (DiscreteSource::from_probs(vec![rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap(), 9),
        ] {
            let ld = LevelDistribution::enumerate(&src, n, DEFAULT_BUDGET).unwrap();
            let mass: BigUint = ld.levels().iter().map(|l| &l.numer * &l.count).sum();
            assert_eq!(&mass, ld.denom());
            assert_eq!(
                ld.total_count(),
                BigUint::from(src.support_size() as u64).pow(n)
            );
            // strictly descending numerators
            for w in ld.levels().windows(2) {
                assert!(w[0].numer > w[1].numer);
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let src = DiscreteSource::from_probs(vec![rat(1, 4); 4]).unwrap();
        let err = LevelDistribution::enumerate(&src, 100, 10).unwrap_err();
        match err {
            Error::BudgetExceeded { required, budget } => {
                assert_eq!(budget, 10);
                assert_eq!(required, compositions_count(100, 4));
            }
            other => panic!("wrong error: {other}"),
        }
    }

    #[test]
    fn m_star_hand_values() {
        let ld = LevelDistribution::enumerate(&bern(1, 4), 2, DEFAULT_BUDGET).unwrap();
        // 9/16 < 3/4 <= 9/16 + 3/16: two sequences needed
        assert_eq!(ld.m_star(&rat(1, 4)).unwrap(), BigUint::from(2u32));
        assert_eq!(ld.m_star(&rat(0, 1)).unwrap(), BigUint::from(4u32));
        // 1 - eps = 9/16 met by the single most likely sequence
        assert_eq!(ld.m_star(&rat(7, 16)).unwrap(), BigUint::from(1u32));
        assert_eq!(ld.m_star(&rat(1, 1)).unwrap(), BigUint::zero());
        assert!(ld.m_star(&rat(-1, 4)).is_err());
        assert!(ld.m_star(&rat(3, 2)).is_err());
    }

    #[test]
    fn eta_quantile_hand_values() {
        let ld = LevelDistribution::enumerate(&bern(1, 4), 2, DEFAULT_BUDGET).unwrap();
        let eta = ld.eta_quantile(&rat(1, 4)).unwrap();
        assert!((eta - (16f64 / 3.0).ln()).abs() < 1e-12);
        let eta = ld.eta_quantile(&rat(1, 2)).unwrap();
        assert!((eta - (16f64 / 9.0).ln()).abs() < 1e-12);
        // degenerate single level
        let u = LevelDistribution::enumerate(&uni2(), 3, DEFAULT_BUDGET).unwrap();
        for eps in [rat(1, 10), rat(1, 2), rat(9, 10)] {
            assert!((u.eta_quantile(&eps).unwrap() - 3.0 * 2f64.ln()).abs() < 1e-12);
        }
        assert!(ld.eta_quantile(&rat(0, 1)).is_err());
        assert!(ld.eta_quantile(&rat(1, 1)).is_err());
    }

    #[test]
    fn mu_counts_hand_values() {
        let ld = LevelDistribution::enumerate(&bern(1, 4), 2, DEFAULT_BUDGET).unwrap();
        // eta strictly between -ln(9/16) and -ln(3/16)
        let eta_mid = 0.5 * ((16f64 / 9.0).ln() + (16f64 / 3.0).ln());
        let (below, at) = ld.mu_counts(eta_mid);
        assert_eq!(below, BigUint::from(1u32));
        assert_eq!(at, BigUint::zero());
        // eta exactly at -ln(3/16): two sequences sit on the level
        let (below, at) = ld.mu_counts((16f64 / 3.0).ln());
        assert_eq!(below, BigUint::from(1u32));
        assert_eq!(at, BigUint::from(2u32));
        // below the minimum information density
        let (below, at) = ld.mu_counts(0.1);
        assert_eq!(below, BigUint::zero());
        assert_eq!(at, BigUint::zero());
    }

    #[test]
    fn loose_m_mu_bracket() {
        // mu{iota < eta} < M* <= mu{iota <= eta} at eta = eta_quantile(eps)
        let src = bern(3, 10);
        for n in [1u32, 2, 5, 9, 14] {
            let ld = LevelDistribution::enumerate(&src, n, DEFAULT_BUDGET).unwrap();
            for eps in [rat(1, 10), rat(1, 4), rat(1, 2), rat(9, 10)] {
                let eta = ld.eta_quantile(&eps).unwrap();
                let (below, at) = ld.mu_counts(eta);
                let m = ld.m_star(&eps).unwrap();
                assert!(below < m, "n={n}");
                assert!(m <= &below + &at, "n={n}");
            }
        }
    }

    #[test]
    fn zeta_quantile_two_atom_case() {
        let src = bern(1, 4);
        let m = src.info_moments();
        let ld = LevelDistribution::enumerate(&src, 1, DEFAULT_BUDGET).unwrap();
        // first crossing of F >= 3/4 is the lower atom -ln(3/4)
        let z = ld.zeta_quantile(&m, &rat(1, 4)).unwrap();
        let ln2 = std::f64::consts::LN_2;
        let want = ((4f64 / 3.0).ln() - m.entropy * ln2) / (m.varentropy.sqrt() * ln2);
        assert!((z - want).abs() < 1e-12);
        // eps -> 1 limit returns the minimum atom
        let z = ld.zeta_quantile(&m, &rat(999, 1000)).unwrap();
        assert!((z - want).abs() < 1e-12);
    }

    #[test]
    fn zeta_symmetric_source_median_nonpositive() {
        let src = DiscreteSource::from_probs(vec![rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap();
        let m = src.info_moments();
        for n in [1u32, 2, 3, 6, 11] {
            let ld = LevelDistribution::enumerate(&src, n, DEFAULT_BUDGET).unwrap();
            assert!(ld.zeta_quantile(&m, &rat(1, 2)).unwrap() <= 0.0, "n={n}");
        }
    }

    #[test]
    fn zeta_rejects_uniform() {
        let ld = LevelDistribution::enumerate(&uni2(), 3, DEFAULT_BUDGET).unwrap();
        let m = uni2().info_moments();
        assert!(ld.zeta_quantile(&m, &rat(1, 2)).is_err());
    }
}
