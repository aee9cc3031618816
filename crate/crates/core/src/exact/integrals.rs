//! Exact integrals of transforms of the step function s -> M*(n, s).
//!
//! M*(n, s) equals the rank r exactly on the interval
//! [1 - cum(r), 1 - cum(r-1)), whose width is the probability of the rank-r
//! sequence. An integral of T(M*(n, s)) is therefore a finite sum of
//! (width x T(rank)) terms; ranks are grouped per level and the inner sums
//! evaluated in closed form, so blocks of 2^n ranks cost O(1).

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::bignum::{big_log2, ln_rank_block_sum, ratio_f64};
use crate::error::{Error, Result};
use crate::exact::levels::{eps_parts, LevelDistribution};

/// Transforms applicable to M*(n, s) under the integral sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MstarTransform {
    /// log2 M*
    Log,
    /// log2(M* + 1)
    LogPlus1,
    /// log2(max(M* - 1, 1)); the clamp keeps the lower chain bound valid at M* = 1
    LogMinus1Clamped,
    /// ceil(log2 M*)
    CeilLog,
    /// ceil(log2(M* + 1))
    CeilLogPlus1,
}

/// sum of log2 r over the integer range [a, b]; zero when b < a.
fn sum_log2_range(a: &BigUint, b: &BigUint) -> Result<f64> {
    if b < a {
        return Ok(0.0);
    }
    let start = a - 1u32;
    let count = b - a + 1u32;
    Ok(ln_rank_block_sum(&start, &count)? / std::f64::consts::LN_2)
}

/// Boundary value of a float transform at a single rank.
fn transform_value(t: MstarTransform, r: &BigUint) -> f64 {
    match t {
        MstarTransform::Log => big_log2(r),
        MstarTransform::LogPlus1 => big_log2(&(r + 1u32)),
        MstarTransform::LogMinus1Clamped => {
            if r <= &BigUint::from(2u32) {
                0.0
            } else {
                big_log2(&(r - 1u32))
            }
        }
        MstarTransform::CeilLog => ceil_log2(r) as f64,
        MstarTransform::CeilLogPlus1 => ceil_log2(&(r + 1u32)) as f64,
    }
}

/// Closed-form sum of a float transform over the rank range [x, y].
fn transform_block_sum(t: MstarTransform, x: &BigUint, y: &BigUint) -> Result<f64> {
    if y < x {
        return Ok(0.0);
    }
    match t {
        MstarTransform::Log => sum_log2_range(x, y),
        MstarTransform::LogPlus1 => sum_log2_range(&(x + 1u32), &(y + 1u32)),
        MstarTransform::LogMinus1Clamped => {
            let two = BigUint::from(2u32);
            let lo = if x > &two { x - 1u32 } else { two };
            if y.is_one() {
                return Ok(0.0);
            }
            sum_log2_range(&lo, &(y - 1u32))
        }
        MstarTransform::CeilLog => ceil_log2_block_sum(x, y, 0)?
            .to_f64()
            .ok_or_else(|| Error::SizeCapExceeded("ceil-log sum exceeds f64".into())),
        MstarTransform::CeilLogPlus1 => ceil_log2_block_sum(x, y, 1)?
            .to_f64()
            .ok_or_else(|| Error::SizeCapExceeded("ceil-log sum exceeds f64".into())),
    }
}

/// ceil(log2 m) for a positive integer: the bit length of m - 1.
fn ceil_log2(m: &BigUint) -> u64 {
    (m - 1u32).bits()
}

/// Exact sum of ceil(log2(r + delta)) over the rank range [x, y].
fn ceil_log2_block_sum(x: &BigUint, y: &BigUint, delta: u32) -> Result<BigUint> {
    if y < x {
        return Ok(BigUint::zero());
    }
    let m_lo = x + delta;
    let m_hi = y + delta;
    let mut acc = BigUint::zero();
    // m with ceil(log2 m) = k lie in [2^(k-1) + 1, 2^k], k >= 1; m = 1 contributes 0.
    let mut k = 1u64;
    while k <= m_hi.bits() {
        let band_lo = (BigUint::one() << (k - 1)) + 1u32;
        let band_hi = BigUint::one() << k;
        let lo = if m_lo > band_lo { m_lo.clone() } else { band_lo };
        let hi = if m_hi < band_hi { m_hi.clone() } else { band_hi };
        if lo <= hi {
            acc += (hi - lo + 1u32) * k;
        }
        k += 1;
    }
    Ok(acc)
}

impl LevelDistribution {
    /// Cumulative scaled mass of the top `r` ranks, given the level that
    /// contains rank r and the mass/rank totals of all earlier levels.
    fn mass_at(&self, level_idx: usize, rank_before: &BigUint, mass_before: &BigUint, r: &BigUint) -> BigUint {
        mass_before + (r - rank_before) * &self.levels()[level_idx].numer
    }

    /// Integral of `transform`(M*(n, s)) over [lo, hi], as f64.
    ///
    /// Breakpoints are the exact cumulative rank probabilities; the result
    /// is a finite sum of (exact width x transform value) terms.
    pub fn mstar_integral(
        &self,
        lo: &BigRational,
        hi: &BigRational,
        transform: MstarTransform,
    ) -> Result<f64> {
        eps_parts(lo)?;
        eps_parts(hi)?;
        if lo >= hi {
            return Err(Error::Domain(format!(
                "integral needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        // Rank whose s-interval contains each endpoint.
        let r_hi = if hi.is_one() {
            BigUint::one()
        } else {
            self.m_star(hi)?
        };
        let r_lo = self.m_star(lo)?;

        let one_minus_cum = |mass: &BigUint| -> BigRational {
            BigRational::new_raw(
                BigInt::from(self.denom() - mass),
                BigInt::from(self.denom().clone()),
            )
        };

        let mut acc = 0.0;
        let mut rank_before = BigUint::zero();
        let mut mass_before = BigUint::zero();
        for (idx, level) in self.levels().iter().enumerate() {
            let level_last = &rank_before + &level.count;
            // overlap of this level's ranks with [r_hi, r_lo]
            let x = if r_hi > &rank_before + 1u32 {
                r_hi.clone()
            } else {
                &rank_before + 1u32
            };
            let y = if r_lo < level_last { r_lo.clone() } else { level_last.clone() };
            if x <= y {
                // interior ranks carry their full width (the level probability)
                let x_full = if x == r_hi { &x + 1u32 } else { x.clone() };
                let y_full = if y == r_lo { &y - 1u32 } else { y.clone() };
                if x_full <= y_full {
                    let p = ratio_f64(&self.prob(idx));
                    acc += p * transform_block_sum(transform, &x_full, &y_full)?;
                }
                // boundary ranks get exact partial widths
                let boundary = |r: &BigUint| -> f64 {
                    let upper_mass = self.mass_at(idx, &rank_before, &mass_before, &(r - 1u32));
                    let lower_mass = self.mass_at(idx, &rank_before, &mass_before, r);
                    let upper = one_minus_cum(&upper_mass); // 1 - cum(r-1)
                    let lower = one_minus_cum(&lower_mass); // 1 - cum(r)
                    let top = if hi < &upper { hi.clone() } else { upper };
                    let bot = if lo > &lower { lo.clone() } else { lower };
                    if top > bot {
                        ratio_f64(&(top - bot)) * transform_value(transform, r)
                    } else {
                        0.0
                    }
                };
                if x == r_hi || x == r_lo {
                    acc += boundary(&x);
                }
                if y != x && (y == r_hi || y == r_lo) {
                    acc += boundary(&y);
                }
            }
            rank_before = level_last;
            mass_before += &level.numer * &level.count;
            if rank_before >= r_lo {
                break;
            }
        }
        Ok(acc)
    }

    /// Exact rational integral of ceil(log2(M*(n, s) + delta)) over [lo, hi]
    /// (delta = 1 when `plus_one`). Used by the identity checks that demand
    /// exact rational equality.
    pub fn ceil_mstar_integral_exact(
        &self,
        lo: &BigRational,
        hi: &BigRational,
        plus_one: bool,
    ) -> Result<BigRational> {
        eps_parts(lo)?;
        eps_parts(hi)?;
        if lo >= hi {
            return Err(Error::Domain(format!(
                "integral needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        let delta = if plus_one { 1u32 } else { 0u32 };
        let r_hi = if hi.is_one() {
            BigUint::one()
        } else {
            self.m_star(hi)?
        };
        let r_lo = self.m_star(lo)?;

        let one_minus_cum = |mass: &BigUint| -> BigRational {
            BigRational::new(
                BigInt::from(self.denom() - mass),
                BigInt::from(self.denom().clone()),
            )
        };

        let mut acc = BigRational::zero();
        let mut rank_before = BigUint::zero();
        let mut mass_before = BigUint::zero();
        for (idx, level) in self.levels().iter().enumerate() {
            let level_last = &rank_before + &level.count;
            let x = if r_hi > &rank_before + 1u32 {
                r_hi.clone()
            } else {
                &rank_before + 1u32
            };
            let y = if r_lo < level_last { r_lo.clone() } else { level_last.clone() };
            if x <= y {
                let x_full = if x == r_hi { &x + 1u32 } else { x.clone() };
                let y_full = if y == r_lo { &y - 1u32 } else { y.clone() };
                if x_full <= y_full {
                    let block = ceil_log2_block_sum(&x_full, &y_full, delta)?;
                    acc += self.prob(idx) * BigRational::from(BigInt::from(block));
                }
                let boundary = |r: &BigUint| {
                    let upper_mass = self.mass_at(idx, &rank_before, &mass_before, &(r - 1u32));
                    let lower_mass = self.mass_at(idx, &rank_before, &mass_before, r);
                    let upper = one_minus_cum(&upper_mass);
                    let lower = one_minus_cum(&lower_mass);
                    let top = if hi < &upper { hi.clone() } else { upper };
                    let bot = if lo > &lower { lo.clone() } else { lower };
                    if top > bot {
                        let val = ceil_log2(&(r + delta));
                        return (top - bot) * BigRational::from(BigInt::from(val));
                    }
                    BigRational::zero()
                };
                if x == r_hi || x == r_lo {
                    acc += boundary(&x);
                }
                if y != x && (y == r_hi || y == r_lo) {
                    acc += boundary(&y);
                }
            }
            rank_before = level_last;
            mass_before += &level.numer * &level.count;
            if rank_before >= r_lo {
                break;
            }
        }
        Ok(acc)
    }

    /// E[<log2 gamma_n>_eps]: the cutoff expectation of the log-rank with
    /// the floor removed. Boundary rank r* = M*(n, eps); ranks below it
    /// contribute p * log2(r), the boundary rank the exact leftover width.
    pub fn no_floor_log_rank_cutoff_expectation(&self, eps: &BigRational) -> Result<f64> {
        let (e, f) = eps_parts(eps)?;
        if e == f {
            return Ok(0.0);
        }
        let r_star = self.m_star(eps)?;
        debug_assert!(!r_star.is_zero());
        let mut acc = 0.0;
        let mut rank_before = BigUint::zero();
        let mut mass_before = BigUint::zero();
        for (idx, level) in self.levels().iter().enumerate() {
            let level_last = &rank_before + &level.count;
            if r_star > level_last {
                // entire level strictly below the boundary
                let p = ratio_f64(&self.prob(idx));
                acc += p * sum_log2_range(&(&rank_before + 1u32), &level_last)?;
            } else {
                // boundary rank lives in this level
                if r_star > &rank_before + 1u32 {
                    let p = ratio_f64(&self.prob(idx));
                    acc += p * sum_log2_range(&(&rank_before + 1u32), &(&r_star - 1u32))?;
                }
                // leftover width (1 - eps) - cum(r* - 1), exact
                let below_mass =
                    &mass_before + (&r_star - 1u32 - &rank_before) * &level.numer;
                let width_num =
                    BigInt::from((&f - &e) * self.denom()) - BigInt::from(below_mass * &f);
                let width = BigRational::new(
                    width_num,
                    BigInt::from(&f * self.denom()),
                );
                acc += ratio_f64(&width) * big_log2(&r_star);
                return Ok(acc);
            }
            rank_before = level_last;
            mass_before += &level.numer * &level.count;
        }
        Ok(acc)
    }
}
