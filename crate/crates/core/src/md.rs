//! Refined moderate-deviations tail formulas and their quantile inversion,
//! for the centered information density in the regime where the deviation
//! grows like o(sqrt(n)).
//!
//! The unspecified constants inside the O(.) terms of the underlying lemmas
//! are surfaced as `remainder_scale` (a magnitude the caller multiplies by
//! its own constant), never folded into the point estimate.

use crate::error::{Error, Result};
use crate::gaussian;
use crate::source::InfoMoments;

/// A moderate-deviations approximation: the point value, the multiplicative
/// skewness correction it contains, and the scale of the unquantified
/// remainder term.
#[derive(Debug, Clone, Copy)]
pub struct MdApprox {
    pub value: f64,
    pub correction: f64,
    pub remainder_scale: f64,
}

/// Which tail of the normalized sum `refined_md_tail` approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSide {
    /// 1 - F_n(z) ~ Q(z) exp(+S z^3 / sqrt(n))
    Upper,
    /// F_n(-z) ~ Phi(-z) exp(-S z^3 / sqrt(n))
    Lower,
}

/// Intended regime guard: z = O(n^{1/6}); true while z <= 2 n^{1/6}.
pub fn md_regime_ok(n: u64, z: f64) -> bool {
    z <= 2.0 * (n as f64).powf(1.0 / 6.0)
}

/// Refined tail of the normalized centered sum at height z >= 0:
/// the Gaussian tail times the skewness correction exp(+-S z^3/sqrt(n)).
/// `remainder_scale` is phi(z)/sqrt(n), the scale of the additive O(.) term.
pub fn refined_md_tail(m: &InfoMoments, n: u64, z: f64, side: TailSide) -> Result<MdApprox> {
    if z < 0.0 || !z.is_finite() {
        return Err(Error::Domain(format!("tail height must be >= 0, got {z}")));
    }
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    let s = m.skew_sixth_checked()?;
    let sqrt_n = (n as f64).sqrt();
    let sign = match side {
        TailSide::Upper => 1.0,
        TailSide::Lower => -1.0,
    };
    let correction = (sign * s * z.powi(3) / sqrt_n).exp();
    Ok(MdApprox {
        value: gaussian::tail(z) * correction,
        correction,
        remainder_scale: gaussian::pdf(z) / sqrt_n,
    })
}

/// Which inversion formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InversionSide {
    /// 1 - Phi(zeta_n(eps_n)) ~ eps_n (1 + S Phi^{-1}(eps_n)^3 / sqrt(n))
    LowerMd1,
    /// Phi(zeta_n(1 - eps_n)) ~ eps_n (1 - S Phi^{-1}(eps_n)^3 / sqrt(n))
    UpperMd2,
}

/// Gaussian mass at the exact quantile: eps_n times the skewness
/// correction. `remainder_scale` is |Phi^{-1}(eps_n)|/sqrt(n); the lemma's
/// O(.) term sits symmetrically at that scale around the point estimate.
pub fn quantile_inversion(
    m: &InfoMoments,
    n: u64,
    eps_n: f64,
    side: InversionSide,
) -> Result<MdApprox> {
    if !(eps_n > 0.0 && eps_n <= 0.5) {
        return Err(Error::Domain(format!(
            "quantile inversion needs eps_n in (0, 1/2], got {eps_n}"
        )));
    }
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    let s = m.skew_sixth_checked()?;
    let sqrt_n = (n as f64).sqrt();
    let q = gaussian::inv_cdf(eps_n)?;
    let sign = match side {
        InversionSide::LowerMd1 => 1.0,
        InversionSide::UpperMd2 => -1.0,
    };
    let correction = 1.0 + sign * s * q.powi(3) / sqrt_n;
    Ok(MdApprox {
        value: eps_n * correction,
        correction,
        remainder_scale: q.abs() / sqrt_n,
    })
}
