//! Float views of arbitrarily large integers and rationals.
//!
//! Probabilities in this crate are exact rationals whose numerators and
//! denominators routinely exceed the dynamic range of `f64` (a blocklength-n
//! sequence probability has a denominator around `d^n`). Everything here
//! extracts logarithms and quotients of such numbers without ever
//! materializing them as floats.

use std::sync::atomic::{AtomicU32, Ordering};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Mantissa width used when truncating big integers for log extraction.
///
/// Anything at or above 64 already exhausts `f64` precision; smaller values
/// deliberately coarsen the conversion (exposed through the CLI `--precision`
/// flag so sweeps can pin down the float precision they were produced with).
pub const DEFAULT_PRECISION_BITS: u32 = 256;

static PRECISION_BITS: AtomicU32 = AtomicU32::new(DEFAULT_PRECISION_BITS);

/// Sets the process-wide mantissa truncation width for log extraction.
/// Intended to be called once at startup (the CLI `--precision` flag).
pub fn set_precision_bits(bits: u32) {
    PRECISION_BITS.store(bits.clamp(8, 1024), Ordering::Relaxed);
}

pub fn precision_bits() -> u32 {
    PRECISION_BITS.load(Ordering::Relaxed)
}

/// log2 of a positive big integer, accurate to ~1 ulp of f64.
///
/// Exact for powers of two, which keeps dyadic probabilities on exact
/// lattice points downstream.
pub fn big_log2(x: &BigUint) -> f64 {
    big_log2_prec(x, precision_bits())
}

/// log2 with an explicit mantissa truncation width (clamped to [8, 1024]).
pub fn big_log2_prec(x: &BigUint, precision_bits: u32) -> f64 {
    debug_assert!(!x.is_zero(), "log2 of zero");
    let bits = x.bits();
    let keep = precision_bits.clamp(8, 1024).min(53 + 11) as u64;
    if bits <= keep {
        return x.to_f64().expect("small biguint fits f64").log2();
    }
    let shift = bits - keep;
    let top = (x >> shift).to_f64().expect("truncated biguint fits f64");
    shift as f64 + top.log2()
}

/// Natural log of a positive big integer.
pub fn big_ln(x: &BigUint) -> f64 {
    big_log2(x) * std::f64::consts::LN_2
}

/// num/den as f64 for positive big integers of any magnitude.
///
/// Handles quotients far outside the f64 exponent range by underflowing to
/// 0.0 or saturating to infinity, which is the behaviour the probability
/// sums in this crate rely on.
pub fn big_ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    debug_assert!(!den.is_zero(), "division by zero");
    if num.is_zero() {
        return 0.0;
    }
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let e = nb - db;
    if e > 1080 {
        return f64::INFINITY;
    }
    if e < -1080 {
        return 0.0;
    }
    // Scale so the integer quotient carries ~64 significant bits.
    let target = db + 64 - nb;
    let (q, exp) = if target > 0 {
        ((num << target as u64) / den, -target)
    } else {
        (num / (den << (-target) as u64), 0)
    };
    let qf = q.to_f64().unwrap_or(f64::INFINITY);
    ldexp(qf, exp)
}

/// Exact rational to f64 (sign-aware wrapper over `big_ratio_f64`).
pub fn ratio_f64(r: &BigRational) -> f64 {
    let v = big_ratio_f64(r.numer().magnitude(), r.denom().magnitude());
    if r.is_negative() {
        -v
    } else {
        v
    }
}

fn ldexp(x: f64, e: i64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    if e == 0 {
        return x;
    }
    // Split the exponent so intermediate powers stay finite/normal.
    let mut v = x;
    let mut rem = e;
    while rem != 0 {
        let step = rem.clamp(-1000, 1000);
        v *= 2f64.powi(step as i32);
        rem -= step;
        if v == 0.0 || !v.is_finite() {
            return v;
        }
    }
    v
}

/// Sum of natural logs over a contiguous rank block:
/// `Σ_{r = start+1}^{start+count} ln r`.
///
/// Rank counts reach `|supp|^n`, so the sum is evaluated in closed form
/// (Stirling / Euler–Maclaurin) rather than per rank. Relative accuracy is
/// ~1e-14 of the sum. Errors out once ranks outgrow the f64 exponent range;
/// only the no-floor diagnostics need this function, the floor-based
/// codelength ops never do.
pub fn ln_rank_block_sum(start: &BigUint, count: &BigUint) -> Result<f64> {
    if count.is_zero() {
        return Ok(0.0);
    }
    let end = start + count;
    if end.bits() > 1000 {
        return Err(Error::SizeCapExceeded(format!(
            "rank block end has {} bits; no-floor log-rank sums support at most 1000",
            end.bits()
        )));
    }
    if start.is_zero() {
        return Ok(ln_factorial(count));
    }
    const LOOP_CAP: u64 = 2048;
    if count.bits() <= 12 && count.to_u64().map(|c| c <= LOOP_CAP).unwrap_or(false) {
        let c = count.to_u64().unwrap();
        let s = start.to_f64().expect("start below 2^1000 fits f64");
        let mut acc = 0.0;
        for i in 1..=c {
            acc += (s + i as f64).ln();
        }
        return Ok(acc);
    }
    // Euler–Maclaurin on f(x) = ln x over [a, b] = [start+1, start+count].
    // The integral is expanded as delta*ln(a) + a*(1+t)*ln1p(t) - delta with
    // t = delta/a, which avoids cancellation between b*ln(b) and a*ln(a).
    let a_big = start + 1u32;
    let a = a_big.to_f64().expect("fits f64 by the bits check");
    let delta = (count - 1u32).to_f64().expect("fits f64 by the bits check");
    let t = delta / a;
    let la = a.ln();
    let lb = la + t.ln_1p();
    let integral = delta * la + a * (1.0 + t) * t.ln_1p() - delta;
    let trapezoid = 0.5 * (la + lb);
    let b = a + delta;
    let bernoulli = (1.0 / b - 1.0 / a) / 12.0;
    Ok(integral + trapezoid + bernoulli)
}

/// ln(c!) for a big integer c, via Stirling's series beyond the loop range.
pub fn ln_factorial(c: &BigUint) -> f64 {
    if let Some(cu) = c.to_u64() {
        if cu <= 256 {
            return (2..=cu).map(|k| (k as f64).ln()).sum();
        }
    }
    let x = c.to_f64().expect("caller keeps counts below 2^1000");
    // Stirling with the 1/(12x) correction; relative error < 1e-16 for x > 256.
    (x + 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
}

/// ceil(num/den) for positive big integers.
pub fn ceil_div(num: &BigUint, den: &BigUint) -> BigUint {
    (num + den - BigUint::one()) / den
}

/// Parses an exact rational from "a/b", a decimal string like "0.25", or an
/// integer. Decimal strings convert exactly (no float round trip).
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bail = || Error::RationalParse(text.to_string());
    if s.is_empty() {
        return Err(bail());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bail())?;
        let d: BigInt = den.trim().parse().map_err(|_| bail())?;
        if d.is_zero() {
            return Err(bail());
        }
        return Ok(BigRational::new(n, d));
    }
    let (sign, digits) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bail());
    }
    let valid = |p: &str| p.chars().all(|c| c.is_ascii_digit());
    if !valid(int_part) || !valid(frac_part) {
        return Err(bail());
    }
    let joined = format!("{}{}", int_part, frac_part);
    let n: BigInt = if joined.is_empty() {
        BigInt::zero()
    } else {
        joined.parse().map_err(|_| bail())?
    };
    let d = BigInt::from(10u32).pow(frac_part.len() as u32);
    Ok(BigRational::new(n * sign, d))
}

/// Renders a rational as "num/den" ("num" alone when the denominator is 1).
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
