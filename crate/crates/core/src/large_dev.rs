//! Strong large deviations for the compression setting: cumulant generating
//! function of the counting-measure tilt, its Fenchel–Legendre transform,
//! and the Bahadur–Rao / perturbed approximations.
//!
//! Everything here works in nats; conversion to bits happens only at module
//! boundaries. The underlying sigma-finite measure is the counting measure
//! on the support, pushed through f = ln P_X, so the cgf specializes to
//! Lambda(s) = ln sum_x P_X(x)^s.

use crate::bignum::big_ln;
use crate::error::{Error, Result};
use crate::source::DiscreteSource;

/// The counting-measure tilt of a source at parameter s.
#[derive(Debug, Clone, Copy)]
pub struct TiltSpec<'a> {
    pub source: &'a DiscreteSource,
    pub s: f64,
}

/// (Lambda, Lambda', Lambda'') at one tilt, all in nats.
#[derive(Debug, Clone, Copy)]
pub struct CgfValues {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// A strong-large-deviations approximation of a log mass:
/// log_value = -exponent + prefactor_log, all in nats.
#[derive(Debug, Clone, Copy)]
pub struct SldApprox {
    pub log_value: f64,
    pub exponent: f64,
    pub prefactor_log: f64,
}

/// Natural logs of the probabilities, f = ln P_X(x).
fn ln_probs(src: &DiscreteSource) -> Vec<f64> {
    src.probs()
        .iter()
        .map(|p| big_ln(p.numer().magnitude()) - big_ln(p.denom().magnitude()))
        .collect()
}

/// Lambda(s) = ln sum_x p_x^s with first and second derivatives.
pub fn cgf(spec: &TiltSpec) -> CgfValues {
    let lp = ln_probs(spec.source);
    let mut w_sum = 0.0;
    let mut t_sum = 0.0;
    let mut t2_sum = 0.0;
    for &t in &lp {
        let w = (spec.s * t).exp();
        w_sum += w;
        t_sum += w * t;
        t2_sum += w * t * t;
    }
    let d1 = t_sum / w_sum;
    CgfValues {
        value: w_sum.ln(),
        d1,
        d2: t2_sum / w_sum - d1 * d1,
    }
}

/// Solves Lambda'(s) = a and returns (s_root, Lambda*(a) = a s - Lambda(s)).
///
/// Newton from s = 1 with doubling bracket expansion and bisection
/// safeguard; Lambda' is monotone (Lambda is convex), so the bracket always
/// closes. Stops at |Lambda'(s) - a| < 1e-12.
pub fn rate_function(src: &DiscreteSource, a: f64) -> Result<(f64, f64)> {
    let lp = ln_probs(src);
    let lo_lim = lp.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi_lim = lp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(a > lo_lim && a < hi_lim) {
        return Err(Error::Domain(format!(
            "rate function argument {a} outside the achievable range ({lo_lim}, {hi_lim})"
        )));
    }
    let d1_at = |s: f64| cgf(&TiltSpec { source: src, s }).d1;

    // Bracket the root by doubling outward from s = 1.
    let mut lo = 1.0f64;
    let mut hi = 1.0f64;
    let mut step = 1.0f64;
    while d1_at(lo) > a {
        lo -= step;
        step *= 2.0;
        if step > 1e9 {
            return Err(Error::RootFinding("tilt bracket expansion diverged".into()));
        }
    }
    step = 1.0;
    while d1_at(hi) < a {
        hi += step;
        step *= 2.0;
        if step > 1e9 {
            return Err(Error::RootFinding("tilt bracket expansion diverged".into()));
        }
    }

    let mut s = 1.0f64.clamp(lo, hi);
    for _ in 0..100 {
        let v = cgf(&TiltSpec { source: src, s });
        let err = v.d1 - a;
        if err.abs() < 1e-12 {
            return Ok((s, a * s - v.value));
        }
        if err > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        let mut next = if v.d2 > 0.0 { s - err / v.d2 } else { 0.5 * (lo + hi) };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        s = next;
    }
    let v = cgf(&TiltSpec { source: src, s });
    if (v.d1 - a).abs() < 1e-9 {
        Ok((s, a * s - v.value))
    } else {
        Err(Error::RootFinding(format!(
            "Lambda'(s) = {a} did not converge: residual {}",
            v.d1 - a
        )))
    }
}

/// Lattice/nonlattice prefactor upsilon_s: d_f/(e^{d_f s} - 1) when the
/// pushed measure is lattice with span d_f (nats), 1/s otherwise.
pub fn upsilon(src: &DiscreteSource, s: f64) -> f64 {
    upsilon_with_span(src.lattice_span(), s)
}

/// Same, with the span supplied explicitly in bits (0 means nonlattice).
/// This is also the override hook for callers that detected the span
/// externally.
pub fn upsilon_with_span(span_bits: f64, s: f64) -> f64 {
    if span_bits > 0.0 {
        let d_f = span_bits * std::f64::consts::LN_2;
        d_f / ((d_f * s).exp_m1())
    } else {
        1.0 / s
    }
}

/// Which mass the Bahadur–Rao approximation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrVariant {
    /// mu{sum f_i > a n}
    Tail,
    /// mu{sum f_i = a n} (lattice only)
    Atom,
}

/// Bahadur–Rao approximation at a = Lambda'(s):
/// mu{sum f_i > a n} ~ e^{-n Lambda*(a)} upsilon_s / sqrt(2 pi n Lambda''(s)),
/// with d_f in place of upsilon_s for the atom variant. The o(1) terms are
/// evaluated at leading order (set to zero).
pub fn bahadur_rao(src: &DiscreteSource, n: u64, s: f64, variant: BrVariant) -> Result<SldApprox> {
    sld_assemble(src, n, s, 0.0, variant)
}

/// Perturbed strong large deviations: the tail mass at threshold
/// a n + a_n with exponent K = n Lambda*(a) + s a_n + a_n^2/(2 n Lambda''(s)).
///
/// The intended regime is |a_n| = o(n); `sld_regime_ok` reports whether
/// |a_n| <= n^0.9 so callers can warn outside it.
pub fn sld_perturbed(src: &DiscreteSource, n: u64, s: f64, a_n: f64) -> Result<SldApprox> {
    sld_assemble(src, n, s, a_n, BrVariant::Tail)
}

/// Regime guard for `sld_perturbed`.
pub fn sld_regime_ok(n: u64, a_n: f64) -> bool {
    a_n.abs() <= (n as f64).powf(0.9)
}

fn sld_assemble(
    src: &DiscreteSource,
    n: u64,
    s: f64,
    a_n: f64,
    variant: BrVariant,
) -> Result<SldApprox> {
    if s <= 0.0 {
        return Err(Error::Domain(format!("tilt parameter s must be > 0, got {s}")));
    }
    let v = cgf(&TiltSpec { source: src, s });
    let a = v.d1;
    let rate = a * s - v.value; // Lambda*(a) via the stationarity identity
    let nf = n as f64;
    let exponent = nf * rate + s * a_n + a_n * a_n / (2.0 * nf * v.d2);
    let front = match variant {
        BrVariant::Tail => upsilon(src, s),
        BrVariant::Atom => {
            let span_bits = src.lattice_span();
            if span_bits <= 0.0 {
                return Err(Error::ZeroMass(
                    "atom masses vanish for a nonlattice source (d_f = 0)".into(),
                ));
            }
            span_bits * std::f64::consts::LN_2
        }
    };
    let prefactor_log = front.ln() - 0.5 * (2.0 * std::f64::consts::PI * nf * v.d2).ln();
    Ok(SldApprox {
        log_value: -exponent + prefactor_log,
        exponent,
        prefactor_log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn lattice_src() -> DiscreteSource {
        DiscreteSource::from_probs(vec![rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap()
    }

    fn nonlattice_src() -> DiscreteSource {
        DiscreteSource::from_probs(vec![rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap()
    }

    #[test]
    fn cgf_at_unit_tilt() {
        let ln2 = std::f64::consts::LN_2;
        for src in [lattice_src(), nonlattice_src()] {
            let m = src.info_moments();
            let v = cgf(&TiltSpec { source: &src, s: 1.0 });
            assert!(v.value.abs() < 1e-14, "Lambda(1) = {}", v.value);
            assert!((v.d1 + ln2 * m.entropy).abs() < 1e-12);
            assert!((v.d2 - ln2 * ln2 * m.varentropy).abs() < 1e-12);
        }
    }

    #[test]
    fn cgf_convexity_on_grid() {
        let src = nonlattice_src();
        let mut s = -3.0;
        while s <= 3.0 {
            assert!(cgf(&TiltSpec { source: &src, s }).d2 > 0.0, "Lambda'' <= 0 at {s}");
            s += 0.25;
        }
    }

    #[test]
    fn rate_function_known_points() {
        let src = lattice_src();
        let ln2 = std::f64::consts::LN_2;
        let h = src.info_moments().entropy;
        // a = Lambda'(1): root s = 1, value a (since Lambda(1) = 0)
        let a = cgf(&TiltSpec { source: &src, s: 1.0 }).d1;
        let (s, rate) = rate_function(&src, a).unwrap();
        assert!((s - 1.0).abs() < 1e-9);
        assert!((rate - a).abs() < 1e-12);
        assert!((rate + ln2 * h).abs() < 1e-12);
        // a = Lambda'(0): root s = 0, value -ln|supp|
        let a0 = cgf(&TiltSpec { source: &src, s: 0.0 }).d1;
        let (s0, rate0) = rate_function(&src, a0).unwrap();
        assert!(s0.abs() < 1e-9);
        assert!((rate0 + 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn rate_function_roundtrip_grid() {
        let src = nonlattice_src();
        // deterministic grid of tilt values mapped through Lambda'
        let mut k = 0u32;
        while k < 100 {
            let s_true = -2.5 + 5.0 * (k as f64 + 0.5) / 100.0;
            let a = cgf(&TiltSpec { source: &src, s: s_true }).d1;
            let (s_root, _) = rate_function(&src, a).unwrap();
            assert!(
                (s_root - s_true).abs() < 1e-8,
                "roundtrip at s = {s_true}: got {s_root}"
            );
            let residual = cgf(&TiltSpec { source: &src, s: s_root }).d1 - a;
            assert!(residual.abs() < 1e-12);
            k += 1;
        }
    }

    #[test]
    fn rate_function_range_check() {
        let src = lattice_src();
        assert!(rate_function(&src, 0.1).is_err()); // above max ln p (= -ln 2)
        assert!(rate_function(&src, -10.0).is_err()); // below min ln p
    }

    #[test]
    fn upsilon_values() {
        let ln2 = std::f64::consts::LN_2;
        assert!((upsilon(&nonlattice_src(), 1.0) - 1.0).abs() < 1e-12);
        // d_X = 1: (ln 2)/(2 - 1)
        assert!((upsilon(&lattice_src(), 1.0) - ln2).abs() < 1e-12);
        // d_f -> 0 recovers 1/s
        for s in [0.5, 1.0, 2.0] {
            let v = upsilon_with_span(1e-8 / ln2, s);
            assert!((v - 1.0 / s).abs() < 1e-7, "s={s}: {v}");
        }
    }

    #[test]
    fn bahadur_rao_assembly() {
        let src = lattice_src();
        let n = 200u64;
        let approx = bahadur_rao(&src, n, 1.0, BrVariant::Tail).unwrap();
        // exponent reduces to -n ln(2) H at s = 1
        let ln2 = std::f64::consts::LN_2;
        let h = src.info_moments().entropy;
        assert!((approx.exponent + n as f64 * ln2 * h).abs() < 1e-9);
        assert!((approx.log_value - (-approx.exponent + approx.prefactor_log)).abs() < 1e-12);
        // atom variant demands a lattice source
        assert!(bahadur_rao(&nonlattice_src(), n, 1.0, BrVariant::Atom).is_err());
        assert!(bahadur_rao(&src, n, 1.0, BrVariant::Atom).is_ok());
        assert!(bahadur_rao(&src, n, -1.0, BrVariant::Tail).is_err());
    }

    #[test]
    fn sld_reduces_to_bahadur_rao() {
        let src = lattice_src();
        let a = bahadur_rao(&src, 150, 1.0, BrVariant::Tail).unwrap();
        let b = sld_perturbed(&src, 150, 1.0, 0.0).unwrap();
        assert_eq!(a.log_value, b.log_value);
    }

    #[test]
    fn sld_exponent_monotone_in_shift() {
        let src = lattice_src();
        let mut prev = sld_perturbed(&src, 150, 1.0, 0.0).unwrap().exponent;
        for a_n in [1.0, 5.0, 20.0, 80.0] {
            let k = sld_perturbed(&src, 150, 1.0, a_n).unwrap().exponent;
            assert!(k > prev, "K not increasing at a_n = {a_n}");
            prev = k;
        }
    }

    #[test]
    fn sld_regime_guard() {
        assert!(sld_regime_ok(1000, 100.0));
        assert!(!sld_regime_ok(1000, 1000.0));
    }
}
