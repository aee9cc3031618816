//! Finite-alphabet memoryless source with an exact-rational pmf.
//!
//! Probabilities are accepted only as exact rationals ("3/10", "0.25"); float
//! inputs are rejected because the exact ordering of products of
//! probabilities downstream depends on exact arithmetic.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Deserialize;

use crate::bignum::{big_log2, format_rational, parse_rational, ratio_f64};
use crate::error::{Error, Result};

/// A discrete memoryless source: symbol labels plus an exact pmf.
///
/// Invariants established at construction: probabilities are positive
/// rationals summing to exactly 1, zero-probability symbols are stripped,
/// and at least two symbols remain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteSource {
    symbols: Vec<String>,
    probs: Vec<BigRational>,
}

/// Scalar information measures of a source, in bits.
///
/// `skew_sixth` is one-sixth of the skewness of the information density; it
/// is base-invariant and `None` exactly when the varentropy vanishes
/// (uniform pmf).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoMoments {
    pub entropy: f64,
    pub varentropy: f64,
    pub skew_sixth: Option<f64>,
}

impl InfoMoments {
    /// The skewness term, or an error for uniform sources where it is undefined.
    pub fn skew_sixth_checked(&self) -> Result<f64> {
        self.skew_sixth
            .ok_or(Error::ZeroVarentropy("the skewness term S"))
    }
}

#[derive(Deserialize)]
struct SourceSpecFile {
    #[serde(default)]
    symbols: Option<Vec<String>>,
    probs: Vec<String>,
}

impl DiscreteSource {
    /// Builds a source from labels and exact probabilities.
    pub fn new(symbols: Vec<String>, probs: Vec<BigRational>) -> Result<Self> {
        if symbols.len() != probs.len() {
            return Err(Error::InvalidSource(format!(
                "{} symbols but {} probabilities",
                symbols.len(),
                probs.len()
            )));
        }
        for (sym, p) in symbols.iter().zip(&probs) {
            if p.is_negative() {
                return Err(Error::InvalidSource(format!(
                    "negative probability {} for symbol {sym:?}",
                    format_rational(p)
                )));
            }
        }
        let sum: BigRational = probs.iter().sum();
        if !sum.is_one() {
            let deficit = BigRational::one() - &sum;
            return Err(Error::NotNormalized {
                sum: format_rational(&sum),
                deficit: format_rational(&deficit),
            });
        }
        // Support convention: zero-probability symbols do not exist.
        let (symbols, probs): (Vec<_>, Vec<_>) = symbols
            .into_iter()
            .zip(probs)
            .filter(|(_, p)| !p.is_zero())
            .unzip();
        if symbols.len() < 2 {
            return Err(Error::InvalidSource(
                "support must contain at least 2 symbols".into(),
            ));
        }
        Ok(Self { symbols, probs })
    }

    /// Builds a source with generated labels from probabilities alone.
    pub fn from_probs(probs: Vec<BigRational>) -> Result<Self> {
        let symbols = (0..probs.len()).map(|i| format!("s{i}")).collect();
        Self::new(symbols, probs)
    }

    /// Two-symbol source with P(first symbol) = p.
    pub fn bernoulli(p: BigRational) -> Result<Self> {
        let q = BigRational::one() - &p;
        Self::new(vec!["1".into(), "0".into()], vec![p, q])
    }

    /// Parses the JSON source-spec format:
    /// `{"symbols": ["a", "b"], "probs": ["3/10", "7/10"]}`.
    /// Probabilities may be fractions or exact decimal strings; `symbols` may
    /// be omitted, in which case labels are generated.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: SourceSpecFile =
            serde_json::from_str(text).map_err(|e| Error::SourceParse(e.to_string()))?;
        let probs = spec
            .probs
            .iter()
            .enumerate()
            .map(|(i, s)| {
                parse_rational(s).map_err(|_| {
                    Error::SourceParse(format!("probs[{i}]: cannot parse {s:?} as exact rational"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        match spec.symbols {
            Some(symbols) => Self::new(symbols, probs),
            None => Self::from_probs(probs),
        }
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    /// The pmf as integer weights over a common denominator:
    /// returns (weights a_i, d) with p_i = a_i/d and sum a_i = d.
    pub fn scaled_weights(&self) -> (Vec<BigUint>, BigUint) {
        let mut d = BigUint::one();
        for p in &self.probs {
            d = d.lcm(p.denom().magnitude());
        }
        let weights = self
            .probs
            .iter()
            .map(|p| p.numer().magnitude() * (&d / p.denom().magnitude()))
            .collect();
        (weights, d)
    }

    /// -log2 of each probability, in bits.
    pub fn info_values_bits(&self) -> Vec<f64> {
        self.probs
            .iter()
            .map(|p| big_log2(p.denom().magnitude()) - big_log2(p.numer().magnitude()))
            .collect()
    }

    /// Entropy, varentropy, and the skewness term.
    pub fn info_moments(&self) -> InfoMoments {
        if self.is_uniform() {
            return InfoMoments {
                entropy: (self.probs.len() as f64).log2(),
                varentropy: 0.0,
                skew_sixth: None,
            };
        }
        let info = self.info_values_bits();
        let pf: Vec<f64> = self.probs.iter().map(ratio_f64).collect();
        let h: f64 = pf.iter().zip(&info).map(|(p, l)| p * l).sum();
        let v: f64 = pf.iter().zip(&info).map(|(p, l)| p * (l - h) * (l - h)).sum();
        let sd = v.sqrt();
        let third: f64 = pf
            .iter()
            .zip(&info)
            .map(|(p, l)| p * ((l - h) / sd).powi(3))
            .sum();
        InfoMoments {
            entropy: h,
            varentropy: v,
            skew_sixth: Some(third / 6.0),
        }
    }

    fn is_uniform(&self) -> bool {
        self.probs.iter().all(|p| p == &self.probs[0])
    }

    /// Renyi entropy of order alpha (bits); continuous extension at alpha = 1.
    pub fn renyi_entropy(&self, alpha: f64) -> Result<f64> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::Domain(format!("Renyi order must be >= 0, got {alpha}")));
        }
        if alpha == 0.0 {
            return Ok((self.probs.len() as f64).log2());
        }
        if alpha == 1.0 {
            return Ok(self.info_moments().entropy);
        }
        let sum: f64 = self
            .probs
            .iter()
            .map(|p| {
                let log2p = big_log2(p.numer().magnitude()) - big_log2(p.denom().magnitude());
                (alpha * log2p).exp2()
            })
            .sum();
        Ok(sum.log2() / (1.0 - alpha))
    }

    /// (H_0, H_inf): log2 of the support size and the min-entropy.
    pub fn support_entropies(&self) -> (f64, f64) {
        let h0 = (self.probs.len() as f64).log2();
        let pmax = self.probs.iter().max().expect("nonempty support");
        let h_inf = big_log2(pmax.denom().magnitude()) - big_log2(pmax.numer().magnitude());
        (h0, h_inf)
    }

    /// Largest probability as an exact rational.
    pub fn max_prob(&self) -> &BigRational {
        self.probs.iter().max().expect("nonempty support")
    }

    /// Every finitely supported source has finite Renyi entropy of all
    /// orders, so Cramer's condition holds unconditionally here. Exposed so
    /// callers of the asymptotic expansions can document the hypothesis.
    pub fn satisfies_cramer(&self) -> bool {
        true
    }

    /// Maximal span d_X (bits) of log2 P(X), or 0 when the source is
    /// nonlattice (or degenerate-uniform, where every span fits).
    ///
    /// Exact route: factor every probability ratio; the log-ratios are
    /// commensurable iff all prime-exponent vectors are integer multiples of
    /// one primitive vector, and then the span is gcd(multiples) * |log2 of
    /// the primitive ratio|. The route is complete for rational pmfs unless
    /// factorization hits the trial-division cap, in which case a numeric
    /// real-gcd fallback (tolerance 1e-9) decides.
    pub fn lattice_span(&self) -> f64 {
        match self.lattice_span_exact() {
            Some(d) => d,
            None => self.lattice_span_numeric(1e-9),
        }
    }

    fn lattice_span_exact(&self) -> Option<f64> {
        let mut complete = true;
        let mut vectors: Vec<BTreeMap<BigUint, i64>> = Vec::new();
        for p in &self.probs[1..] {
            let ratio = p / &self.probs[0];
            let mut vec = BTreeMap::new();
            complete &= accumulate_factors(ratio.numer().magnitude(), 1, &mut vec);
            complete &= accumulate_factors(ratio.denom().magnitude(), -1, &mut vec);
            vec.retain(|_, e| *e != 0);
            vectors.push(vec);
        }
        if !complete {
            return None; // factorization incomplete: numeric fallback decides
        }
        if vectors.iter().all(|v| v.is_empty()) {
            return Some(0.0); // uniform: every span fits, no maximal one
        }
        // Primitive direction from the first nonzero vector.
        let base = vectors.iter().find(|v| !v.is_empty()).unwrap().clone();
        let g0 = base.values().fold(0i64, |acc, e| gcd_i64(acc, *e));
        let primitive: BTreeMap<BigUint, i64> =
            base.iter().map(|(p, e)| (p.clone(), e / g0)).collect();
        // Every vector must be an integer multiple of the primitive one.
        let mut coeffs: Vec<i64> = vec![0]; // the reference symbol itself
        for v in &vectors {
            if v.is_empty() {
                coeffs.push(0);
                continue;
            }
            if v.len() != primitive.len() {
                return Some(0.0);
            }
            let (p0, e0) = primitive.iter().next().unwrap();
            let ve0 = *v.get(p0)?;
            if ve0 % e0 != 0 {
                return Some(0.0);
            }
            let c = ve0 / e0;
            for (p, e) in &primitive {
                if v.get(p).copied().unwrap_or(0) != c * e {
                    return Some(0.0);
                }
            }
            coeffs.push(c);
        }
        let g = coeffs.iter().fold(0i64, |acc, c| gcd_i64(acc, *c));
        if g == 0 {
            return Some(0.0);
        }
        let log2_base: f64 = primitive
            .iter()
            .map(|(p, e)| *e as f64 * big_log2(p))
            .sum();
        Some((g as f64 * log2_base).abs())
    }

    fn lattice_span_numeric(&self, tol: f64) -> f64 {
        let info = self.info_values_bits();
        let mut diffs: Vec<f64> = Vec::new();
        for i in 0..info.len() {
            for j in (i + 1)..info.len() {
                let d = (info[i] - info[j]).abs();
                if d > tol {
                    diffs.push(d);
                }
            }
        }
        if diffs.is_empty() {
            return 0.0;
        }
        let mut g = diffs[0];
        for &d in &diffs[1..] {
            g = real_gcd(g, d, tol);
            if g < tol {
                return 0.0;
            }
        }
        // Verify: every difference must be an integer multiple of g.
        for &d in &diffs {
            let k = d / g;
            if (k - k.round()).abs() > 1e-9 * k.max(1.0) {
                return 0.0;
            }
        }
        g
    }
}

/// Adds the prime factorization of `n` (times `sign`) into `acc`.
/// Returns false if the trial-division cap left an unfactored composite.
fn accumulate_factors(n: &BigUint, sign: i64, acc: &mut BTreeMap<BigUint, i64>) -> bool {
    const TRIAL_CAP: u64 = 1_000_000;
    let mut rest = n.clone();
    let mut push = |p: BigUint, count: i64| {
        *acc.entry(p).or_insert(0) += sign * count;
    };
    let mut d = 2u64;
    while d <= TRIAL_CAP {
        let db = BigUint::from(d);
        if (&db * &db) > rest {
            break;
        }
        let mut count = 0i64;
        while (&rest % &db).is_zero() {
            rest /= &db;
            count += 1;
        }
        if count > 0 {
            push(db, count);
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    if rest.is_one() {
        return true;
    }
    // Remainder has no factor below the cap: prime if below cap^2.
    let certain = rest < BigUint::from(TRIAL_CAP) * BigUint::from(TRIAL_CAP);
    push(rest, 1);
    certain
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn real_gcd(a: f64, b: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    while b > tol {
        let r = a - b * (a / b).round();
        (a, b) = (b, r.abs());
        if a < b {
            std::mem::swap(&mut a, &mut b);
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    pub(crate) fn bern_quarter() -> DiscreteSource {
        DiscreteSource::bernoulli(rat(1, 4)).unwrap()
    }

    fn half_quarter_quarter() -> DiscreteSource {
        DiscreteSource::from_probs(vec![rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap()
    }

    #[test]
    fn construction_validates() {
        assert!(DiscreteSource::from_probs(vec![rat(1, 2), rat(49, 100)]).is_err());
        let err = DiscreteSource::from_probs(vec![rat(49, 100), rat(50, 100)]).unwrap_err();
        assert!(err.to_string().contains("1/100"), "deficit named: {err}");
        // zero-prob symbols are stripped
        let s =
            DiscreteSource::from_probs(vec![rat(1, 2), rat(0, 1), rat(1, 2)]).unwrap();
        assert_eq!(s.support_size(), 2);
        // a single-symbol support is rejected
        assert!(DiscreteSource::from_probs(vec![rat(1, 1), rat(0, 1)]).is_err());
    }

    #[test]
    fn json_format() {
        let s = DiscreteSource::from_json_str(
            r#"{"symbols": ["a", "b"], "probs": ["3/10", "0.7"]}"#,
        )
        .unwrap();
        assert_eq!(s.probs()[0], rat(3, 10));
        assert_eq!(s.probs()[1], rat(7, 10));
        assert!(DiscreteSource::from_json_str(r#"{"probs": ["0.5", "x"]}"#).is_err());
        assert!(DiscreteSource::from_json_str("{").is_err());
    }

    #[test]
    fn entropy_of_bernoulli_quarter() {
        let m = bern_quarter().info_moments();
        assert!((m.entropy - 0.8112781244591328).abs() < 1e-12);
        assert!(m.varentropy > 0.0);
    }

    #[test]
    fn uniform_has_zero_varentropy() {
        let u4 = DiscreteSource::from_probs(vec![rat(1, 4); 4]).unwrap();
        let m = u4.info_moments();
        assert_eq!(m.entropy, 2.0);
        assert_eq!(m.varentropy, 0.0);
        assert!(m.skew_sixth.is_none());
        assert!(m.skew_sixth_checked().is_err());
    }

    #[test]
    fn symmetric_info_density_has_zero_skew() {
        // info density takes values 1 and 2 each with probability 1/2
        let m = half_quarter_quarter().info_moments();
        assert!((m.entropy - 1.5).abs() < 1e-14);
        assert!((m.varentropy - 0.25).abs() < 1e-14);
        assert!(m.skew_sixth.unwrap().abs() < 1e-14);
    }

    #[test]
    fn renyi_entropy_values() {
        let s = bern_quarter();
        assert_eq!(s.renyi_entropy(0.0).unwrap(), 1.0);
        assert!((s.renyi_entropy(1.0).unwrap() - 0.8112781244591328).abs() < 1e-12);
        assert!((s.renyi_entropy(2.0).unwrap() - 0.6780719051126377).abs() < 1e-12);
        assert!(s.renyi_entropy(-1.0).is_err());
    }

    #[test]
    fn renyi_is_nonincreasing_and_bounded() {
        let s = DiscreteSource::from_probs(vec![rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap();
        let (h0, h_inf) = s.support_entropies();
        let mut prev = f64::INFINITY;
        let mut alpha = 0.0;
        while alpha <= 8.0 {
            let h = s.renyi_entropy(alpha).unwrap();
            assert!(h <= prev + 1e-12, "renyi not nonincreasing at alpha={alpha}");
            assert!(h <= h0 + 1e-12 && h >= h_inf - 1e-12);
            prev = h;
            alpha += 0.25;
        }
    }

    #[test]
    fn support_entropy_values() {
        let (h0, hinf) = bern_quarter().support_entropies();
        assert_eq!(h0, 1.0);
        assert!((hinf - (4f64 / 3.0).log2()).abs() < 1e-12);
        let u8 = DiscreteSource::from_probs(vec![rat(1, 8); 8]).unwrap();
        assert_eq!(u8.support_entropies(), (3.0, 3.0));
        let (h0, hinf) = half_quarter_quarter().support_entropies();
        assert!((h0 - 3f64.log2()).abs() < 1e-14);
        assert_eq!(hinf, 1.0);
    }

    #[test]
    fn lattice_span_dyadic() {
        assert_eq!(half_quarter_quarter().lattice_span(), 1.0);
    }

    #[test]
    fn lattice_span_two_thirds() {
        let s = DiscreteSource::from_probs(vec![rat(2, 3), rat(1, 3)]).unwrap();
        assert!((s.lattice_span() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lattice_span_binary_irrational() {
        // Any two-point source is a lattice source; here the span is the
        // single log-ratio log2(7/3), an irrational number.
        let s = DiscreteSource::bernoulli(rat(3, 10)).unwrap();
        let want = (7f64 / 3.0).log2();
        assert!((s.lattice_span() - want).abs() < 1e-12);
    }

    #[test]
    fn lattice_span_common_irrational_base() {
        // ratios 3 and 9: all log-ratios are multiples of log2(3)
        let s = DiscreteSource::from_probs(vec![rat(9, 13), rat(3, 13), rat(1, 13)]).unwrap();
        assert!((s.lattice_span() - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn nonlattice_three_symbols() {
        // log-ratios 1 and log2(3) are incommensurable
        let s = DiscreteSource::from_probs(vec![rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap();
        assert_eq!(s.lattice_span(), 0.0);
    }

    #[test]
    fn lattice_span_multiple_invariant() {
        for src in [
            half_quarter_quarter(),
            DiscreteSource::from_probs(vec![rat(9, 13), rat(3, 13), rat(1, 13)]).unwrap(),
            DiscreteSource::bernoulli(rat(3, 10)).unwrap(),
        ] {
            let d = src.lattice_span();
            assert!(d > 0.0);
            let info = src.info_values_bits();
            for i in 0..info.len() {
                for j in 0..info.len() {
                    let k = (info[i] - info[j]) / d;
                    assert!((k - k.round()).abs() < 1e-12, "diff/d = {k} not integral");
                }
            }
        }
    }

    #[test]
    fn cramer_always_holds() {
        assert!(bern_quarter().satisfies_cramer());
        assert!(half_quarter_quarter().satisfies_cramer());
    }

    #[test]
    fn scaled_weights_common_denominator() {
        let s = DiscreteSource::from_probs(vec![rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap();
        let (w, d) = s.scaled_weights();
        assert_eq!(d, BigUint::from(6u32));
        assert_eq!(w, vec![3u32.into(), 2u32.into(), 1u32.into()]);
    }
}
