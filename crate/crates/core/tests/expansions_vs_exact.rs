//! Cross-checks of the closed-form expansions against the exact machinery
//! at desk scale: each asymptotic form must track its exact counterpart at
//! the rate its remainder term promises.

use vlc_limits::asymptotics::{self, DispersionSide};
use vlc_limits::bignum::big_log2;
use vlc_limits::exact::{LevelDistribution, LogBase, DEFAULT_BUDGET};
use vlc_limits::gaussian;
use vlc_limits::md::{self, InversionSide, TailSide};
use vlc_limits::source::DiscreteSource;
use vlc_limits::BigRational;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn bern_3_10() -> DiscreteSource {
    DiscreteSource::bernoulli(rat(3, 10)).unwrap()
}

#[test]
fn dispersion_refinement_tracks_exact_rate() {
    // D*(n, 1/n) from the exact M* vs the refined expansion: the gap decays
    // like C/sqrt(n); C measures ~4.6 here, asserted at 10.
    let src = bern_3_10();
    let m = src.info_moments();
    let mut prev_gap = f64::INFINITY;
    for n in [400u32, 1600, 6400] {
        let ld = LevelDistribution::enumerate(&src, n, DEFAULT_BUDGET).unwrap();
        let log2m = big_log2(&ld.m_star(&rat(1, n as i64)).unwrap());
        let exact = (log2m - n as f64 * m.entropy) / (n as f64 * m.varentropy).sqrt();
        let (linear, _) =
            asymptotics::dispersion_expansion(&m, n as u64, 1.0, DispersionSide::ErrorSmall)
                .unwrap();
        let gap = (exact - linear).abs();
        assert!(
            gap <= 10.0 / (n as f64).sqrt(),
            "n={n}: gap {gap} exceeds 10/sqrt(n)"
        );
        assert!(gap < prev_gap, "n={n}: gap did not shrink");
        prev_gap = gap;
    }
}

#[test]
fn eta_quantile_expansion_stays_order_one() {
    let src = bern_3_10();
    let m = src.info_moments();
    for n in [400u32, 1000] {
        let ld = LevelDistribution::enumerate(&src, n, DEFAULT_BUDGET).unwrap();
        let eta_bits = ld.eta_quantile(&rat(1, n as i64)).unwrap() / std::f64::consts::LN_2;
        let expansion = asymptotics::eta_md_expansion(&m, n as u64, 1.0 / n as f64).unwrap();
        assert!(
            (eta_bits - expansion).abs() < 3.0,
            "n={n}: |{eta_bits} - {expansion}| not O(1)-sized"
        );
    }
}

#[test]
fn info_cutoff_expansion_remainder_bounded() {
    // E[<log 1/P(X^n)>_eps] vs its two-term expansion across an n sweep.
    let src = bern_3_10();
    let m = src.info_moments();
    let mut worst: f64 = 0.0;
    for n in (20..=200).step_by(20) {
        let ld = LevelDistribution::enumerate(&src, n, DEFAULT_BUDGET).unwrap();
        let dist = ld.info_density_dist(LogBase::Bits, None);
        for (en, ed) in [(0i64, 1i64), (3, 10), (1, 2), (9, 10)] {
            let exact = dist.cutoff_expectation(&rat(en, ed)).unwrap();
            let expansion = asymptotics::info_cutoff_expansion(&m, n as u64, en as f64 / ed as f64)
                .unwrap();
            worst = worst.max((exact - expansion).abs());
        }
    }
    // measures ~0.023 bits on this sweep
    assert!(worst < 0.5, "worst info-cutoff remainder {worst}");
}

#[test]
fn refined_tail_matches_exact_cdf() {
    // 1 - F_n(z) at z = 2, n = 10^4: the exact tail mass of the normalized
    // information density against the skewness-corrected Gaussian tail; the
    // lemma's additive remainder scale is phi(z)/sqrt(n).
    let src = bern_3_10();
    let m = src.info_moments();
    let n = 10_000u32;
    let ld = LevelDistribution::enumerate(&src, n, DEFAULT_BUDGET).unwrap();
    let ln2 = std::f64::consts::LN_2;
    let sigma = m.varentropy.sqrt() * ln2;
    let threshold = n as f64 * m.entropy * ln2 + 2.0 * sigma * (n as f64).sqrt();
    let mut tail_mass = 0.0;
    for i in 0..ld.levels().len() {
        if ld.iota_nats(i) > threshold {
            tail_mass += ld.level_mass_f64(i);
        }
    }
    let approx = md::refined_md_tail(&m, n as u64, 2.0, TailSide::Upper).unwrap();
    let diff = (tail_mass - approx.value).abs();
    assert!(
        diff <= 10.0 * approx.remainder_scale,
        "tail gap {diff} vs scale {}",
        approx.remainder_scale
    );
}

#[test]
fn quantile_inversion_matches_exact_quantile() {
    // Phi(zeta_n(1 - eps_n)) vs eps_n times the skewness correction at a
    // fixed eps_n = 1/100 and n = 10^4.
    let src = bern_3_10();
    let m = src.info_moments();
    let n = 10_000u32;
    let ld = LevelDistribution::enumerate(&src, n, DEFAULT_BUDGET).unwrap();
    let zeta = ld.zeta_quantile(&m, &rat(99, 100)).unwrap();
    let pred = md::quantile_inversion(&m, n as u64, 0.01, InversionSide::UpperMd2).unwrap();
    let diff = (gaussian::cdf(zeta) - pred.value).abs();
    let tol = 10.0 * 0.01 * pred.remainder_scale;
    assert!(diff <= tol, "inversion gap {diff} vs tolerance {tol}");
}

#[test]
fn third_order_lead_over_second_order() {
    // On a live sweep the three-term form must beat the two-term form once
    // n is large (its extra term is the real drift of the remainder).
    let src = bern_3_10();
    let m = src.info_moments();
    let eps = rat(1, 2);
    for n in [200u32, 500, 1000] {
        let ld = LevelDistribution::enumerate(&src, n, DEFAULT_BUDGET).unwrap();
        let l = vlc_limits::bignum::ratio_f64(&ld.l_star(&eps).unwrap());
        let e2 = asymptotics::vl_second_order(&m, n as u64, 0.5).unwrap();
        let e3 = asymptotics::vl_third_order(&m, n as u64, 0.5).unwrap();
        assert!(
            (l - e3).abs() < (l - e2).abs(),
            "n={n}: third-order form not closer"
        );
    }
}
