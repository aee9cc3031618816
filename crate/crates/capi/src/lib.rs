//! C ABI for the compression-limits library: opaque handles, status codes,
//! and flat f64/string outputs. The header `include/vlc_limits.h` is
//! generated by cbindgen at build time.
//!
//! Conventions:
//! * Every fallible call returns a `VlcStatus`; outputs go through pointers
//!   that must be non-null.
//! * `eps` crosses the boundary as an exact rational `eps_num/eps_den`.
//! * Strings returned through `char**` are owned by the library; release
//!   them with `vlc_string_free`. Handles have matching `_free` functions.
//! * Errors never unwind across the boundary; a panic maps to
//!   `VLC_STATUS_PANIC`. `vlc_last_error` returns a thread-local message
//!   for the most recent failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use vlc_limits::asymptotics::{self, MdConvention};
use vlc_limits::bignum::{big_log2, format_rational, ratio_f64};
use vlc_limits::error::Error;
use vlc_limits::exact::LevelDistribution;
use vlc_limits::gaussian;
use vlc_limits::large_dev::{self, BrVariant};
use vlc_limits::source::{DiscreteSource, InfoMoments};
use vlc_limits::BigRational;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    DomainError = 4,
    BudgetExceeded = 5,
    SizeCapExceeded = 6,
    Panic = 7,
}

/// Coefficient convention for the moderate-deviations block expansion.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlcMdConvention {
    BitsPaper = 0,
    NatsConverted = 1,
}

/// Which mass a strong-large-deviations approximation targets.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlcBrVariant {
    Tail = 0,
    Atom = 1,
}

/// Strong-large-deviations approximation, all fields in nats:
/// log_value = -exponent + prefactor_log.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VlcSldApprox {
    pub log_value: f64,
    pub exponent: f64,
    pub prefactor_log: f64,
}

/// Opaque handle: a finite memoryless source with exact-rational pmf.
pub struct VlcSource {
    inner: DiscreteSource,
    moments: InfoMoments,
}

/// Opaque handle: the level distribution of X^n for one source.
pub struct VlcLevels {
    inner: LevelDistribution,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap_or_default());
}

fn status_of(err: &Error) -> VlcStatus {
    set_error(&err.to_string());
    match err {
        Error::InvalidSource(_)
        | Error::NotNormalized { .. }
        | Error::RationalParse(_)
        | Error::SourceParse(_)
        | Error::Usage(_)
        | Error::UnknownCheck(_) => VlcStatus::ParseError,
        Error::BudgetExceeded { .. } => VlcStatus::BudgetExceeded,
        Error::SizeCapExceeded(_) => VlcStatus::SizeCapExceeded,
        _ => VlcStatus::DomainError,
    }
}

fn guarded<F: FnOnce() -> VlcStatus>(f: F) -> VlcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            VlcStatus::Panic
        }
    }
}

fn eps_rational(eps_num: u64, eps_den: u64) -> Result<BigRational, VlcStatus> {
    if eps_den == 0 {
        set_error("eps denominator must be nonzero");
        return Err(VlcStatus::DomainError);
    }
    Ok(BigRational::new(eps_num.into(), eps_den.into()))
}

macro_rules! nonnull {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            set_error(concat!("null pointer: ", stringify!($p)));
            return VlcStatus::NullPointer;
        })+
    };
}

/// Message for the most recent failure on this thread. Valid until the next
/// failing call; do not free.
#[no_mangle]
pub extern "C" fn vlc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn vlc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses a source from its JSON spec:
/// `{"symbols": ["a", "b"], "probs": ["3/10", "7/10"]}`.
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` must be non-null.
#[no_mangle]
pub unsafe extern "C" fn vlc_source_from_json(
    json: *const c_char,
    out: *mut *mut VlcSource,
) -> VlcStatus {
    guarded(|| {
        nonnull!(json, out);
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("source JSON is not valid UTF-8");
                return VlcStatus::InvalidUtf8;
            }
        };
        match DiscreteSource::from_json_str(text) {
            Ok(inner) => {
                let moments = inner.info_moments();
                *out = Box::into_raw(Box::new(VlcSource { inner, moments }));
                VlcStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Releases a source handle. Null is a no-op.
///
/// # Safety
/// `src` must come from `vlc_source_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn vlc_source_free(src: *mut VlcSource) {
    if !src.is_null() {
        drop(Box::from_raw(src));
    }
}

/// Entropy (bits), varentropy (bits^2), and the skewness term of the
/// information density. The skewness term is NaN for uniform sources,
/// where it is undefined.
///
/// # Safety
/// All pointers must be non-null; `src` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn vlc_source_info_moments(
    src: *const VlcSource,
    entropy: *mut f64,
    varentropy: *mut f64,
    skew_sixth: *mut f64,
) -> VlcStatus {
    guarded(|| {
        nonnull!(src, entropy, varentropy, skew_sixth);
        let m = (*src).moments;
        *entropy = m.entropy;
        *varentropy = m.varentropy;
        *skew_sixth = m.skew_sixth.unwrap_or(f64::NAN);
        VlcStatus::Ok
    })
}

/// (log2 of the support size, min-entropy), both in bits.
///
/// # Safety
/// All pointers must be non-null; `src` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn vlc_source_support_entropies(
    src: *const VlcSource,
    h0: *mut f64,
    h_inf: *mut f64,
) -> VlcStatus {
    guarded(|| {
        nonnull!(src, h0, h_inf);
        let (a, b) = (*src).inner.support_entropies();
        *h0 = a;
        *h_inf = b;
        VlcStatus::Ok
    })
}

/// Renyi entropy of order `alpha >= 0`, bits.
///
/// # Safety
/// `src` must be a live handle; `out` non-null.
#[no_mangle]
pub unsafe extern "C" fn vlc_source_renyi_entropy(
    src: *const VlcSource,
    alpha: f64,
    out: *mut f64,
) -> VlcStatus {
    guarded(|| {
        nonnull!(src, out);
        match (*src).inner.renyi_entropy(alpha) {
            Ok(v) => {
                *out = v;
                VlcStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Maximal lattice span of log2 P(X) in bits; 0 for nonlattice sources.
///
/// # Safety
/// `src` must be a live handle; `out` non-null.
#[no_mangle]
pub unsafe extern "C" fn vlc_source_lattice_span(
    src: *const VlcSource,
    out: *mut f64,
) -> VlcStatus {
    guarded(|| {
        nonnull!(src, out);
        *out = (*src).inner.lattice_span();
        VlcStatus::Ok
    })
}

/// Enumerates the level distribution of X^n (up to `budget` type classes;
/// pass 0 for the default budget of 10^7).
///
/// # Safety
/// `src` must be a live handle; `out` non-null.
#[no_mangle]
pub unsafe extern "C" fn vlc_levels_enumerate(
    src: *const VlcSource,
    n: u32,
    budget: u64,
    out: *mut *mut VlcLevels,
) -> VlcStatus {
    guarded(|| {
        nonnull!(src, out);
        let budget = if budget == 0 {
            vlc_limits::exact::DEFAULT_BUDGET
        } else {
            budget
        };
        match LevelDistribution::enumerate(&(*src).inner, n, budget) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(VlcLevels { inner }));
                VlcStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Releases a level-distribution handle. Null is a no-op.
///
/// # Safety
/// `levels` must come from `vlc_levels_enumerate` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn vlc_levels_free(levels: *mut VlcLevels) {
    if !levels.is_null() {
        drop(Box::from_raw(levels));
    }
}

/// Releases a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must come from a `_string` function of this library.
#[no_mangle]
pub unsafe extern "C" fn vlc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> VlcStatus {
    match CString::new(text) {
        Ok(c) => {
            *out = c.into_raw();
            VlcStatus::Ok
        }
        Err(_) => {
            set_error("interior NUL in produced string");
            VlcStatus::Panic
        }
    }
}

/// M*(n, eps) as a decimal string (exact big integer).
///
/// # Safety
/// `levels` must be a live handle; `out` non-null. Free the string with
/// `vlc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn vlc_m_star_string(
    levels: *const VlcLevels,
    eps_num: u64,
    eps_den: u64,
    out: *mut *mut c_char,
) -> VlcStatus {
    guarded(|| {
        nonnull!(levels, out);
        let eps = match eps_rational(eps_num, eps_den) {
            Ok(e) => e,
            Err(s) => return s,
        };
        match (*levels).inner.m_star(&eps) {
            Ok(m) => write_string(out, m.to_string()),
            Err(e) => status_of(&e),
        }
    })
}

/// log2 of M*(n, eps); -inf when M* = 0 (eps = 1).
///
/// # Safety
/// `levels` must be a live handle; `out` non-null.
#[no_mangle]
pub unsafe extern "C" fn vlc_log2_m_star(
    levels: *const VlcLevels,
    eps_num: u64,
    eps_den: u64,
    out: *mut f64,
) -> VlcStatus {
    guarded(|| {
        nonnull!(levels, out);
        let eps = match eps_rational(eps_num, eps_den) {
            Ok(e) => e,
            Err(s) => return s,
        };
        match (*levels).inner.m_star(&eps) {
            Ok(m) => {
                *out = if m == 0u32.into() {
                    f64::NEG_INFINITY
                } else {
                    big_log2(&m)
                };
                VlcStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// L*(eps | X^n) in bits.
///
/// # Safety
/// `levels` must be a live handle; `out` non-null.
#[no_mangle]
pub unsafe extern "C" fn vlc_l_star(
    levels: *const VlcLevels,
    eps_num: u64,
    eps_den: u64,
    out: *mut f64,
) -> VlcStatus {
    guarded(|| {
        nonnull!(levels, out);
        let eps = match eps_rational(eps_num, eps_den) {
            Ok(e) => e,
            Err(s) => return s,
        };
        match (*levels).inner.l_star(&eps) {
            Ok(l) => {
                *out = ratio_f64(&l);
                VlcStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// L*(eps | X^n) as an exact rational string "num/den".
///
/// # Safety
/// `levels` must be a live handle; `out` non-null. Free the string with
/// `vlc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn vlc_l_star_string(
    levels: *const VlcLevels,
    eps_num: u64,
    eps_den: u64,
    out: *mut *mut c_char,
) -> VlcStatus {
    guarded(|| {
        nonnull!(levels, out);
        let eps = match eps_rational(eps_num, eps_den) {
            Ok(e) => e,
            Err(s) => return s,
        };
        match (*levels).inner.l_star(&eps) {
            Ok(l) => write_string(out, format_rational(&l)),
            Err(e) => status_of(&e),
        }
    })
}

/// Information-density quantile eta_n(eps) in nats.
///
/// # Safety
/// `levels` must be a live handle; `out` non-null.
#[no_mangle]
pub unsafe extern "C" fn vlc_eta_quantile_nats(
    levels: *const VlcLevels,
    eps_num: u64,
    eps_den: u64,
    out: *mut f64,
) -> VlcStatus {
    guarded(|| {
        nonnull!(levels, out);
        let eps = match eps_rational(eps_num, eps_den) {
            Ok(e) => e,
            Err(s) => return s,
        };
        match (*levels).inner.eta_quantile(&eps) {
            Ok(v) => {
                *out = v;
                VlcStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Exact quantile of the normalized centered information density.
///
/// # Safety
/// `src` and `levels` must be live handles over the same source; `out`
/// non-null.
#[no_mangle]
pub unsafe extern "C" fn vlc_zeta_quantile(
    src: *const VlcSource,
    levels: *const VlcLevels,
    eps_num: u64,
    eps_den: u64,
    out: *mut f64,
) -> VlcStatus {
    guarded(|| {
        nonnull!(src, levels, out);
        let eps = match eps_rational(eps_num, eps_den) {
            Ok(e) => e,
            Err(s) => return s,
        };
        match (*levels).inner.zeta_quantile(&(*src).moments, &eps) {
            Ok(v) => {
                *out = v;
                VlcStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

macro_rules! expansion_fn {
    ($(#[$doc:meta])* $name:ident, |$m:ident, $n:ident, $eps:ident| $body:expr) => {
        $(#[$doc])*
        /// # Safety
        /// `src` must be a live handle; `out` non-null.
        #[no_mangle]
        pub unsafe extern "C" fn $name(
            src: *const VlcSource,
            n: u64,
            eps: f64,
            out: *mut f64,
        ) -> VlcStatus {
            guarded(|| {
                nonnull!(src, out);
                let $m = &(*src).moments;
                let $n = n;
                let $eps = eps;
                match $body {
                    Ok(v) => {
                        *out = v;
                        VlcStatus::Ok
                    }
                    Err(e) => status_of(&e),
                }
            })
        }
    };
}

expansion_fn!(
    /// Two-term variable-length expansion n(1-eps)H - sqrt(nV) f_G(eps), bits.
    vlc_vl_second_order,
    |m, n, eps| asymptotics::vl_second_order(m, n, eps)
);
expansion_fn!(
    /// Three-term variable-length expansion (eps > 0), bits.
    vlc_vl_third_order,
    |m, n, eps| asymptotics::vl_third_order(m, n, eps)
);
expansion_fn!(
    /// Fixed-length third-order expansion of log2 M*(n, eps), bits.
    vlc_fl_third_order,
    |m, n, eps| asymptotics::fl_third_order(m, n, eps)
);
expansion_fn!(
    /// Moderate-deviations expansion of the quantile eta_n(eps), bits.
    vlc_eta_md_expansion,
    |m, n, eps| asymptotics::eta_md_expansion(m, n, eps)
);
expansion_fn!(
    /// Expansion of the eps-cutoff expectation of the information density, bits.
    vlc_info_cutoff_expansion,
    |m, n, eps| asymptotics::info_cutoff_expansion(m, n, eps)
);

/// Zero-error variable-length expansion nH - (1/2) log2 n, bits.
///
/// # Safety
/// `src` must be a live handle; `out` non-null.
#[no_mangle]
pub unsafe extern "C" fn vlc_vl_zero_error(
    src: *const VlcSource,
    n: u64,
    out: *mut f64,
) -> VlcStatus {
    guarded(|| {
        nonnull!(src, out);
        *out = asymptotics::vl_zero_error(&(*src).moments, n);
        VlcStatus::Ok
    })
}

/// Moderate-deviations block expansion of log2 M*(n, eps_n) under the
/// chosen coefficient convention, bits.
///
/// # Safety
/// `src` must be a live handle; `out` non-null.
#[no_mangle]
pub unsafe extern "C" fn vlc_fl_md_expansion(
    src: *const VlcSource,
    n: u64,
    eps: f64,
    convention: VlcMdConvention,
    out: *mut f64,
) -> VlcStatus {
    guarded(|| {
        nonnull!(src, out);
        let conv = match convention {
            VlcMdConvention::BitsPaper => MdConvention::BitsPaper,
            VlcMdConvention::NatsConverted => MdConvention::NatsConverted,
        };
        match asymptotics::fl_md_expansion(&(*src).moments, n, eps, conv) {
            Ok(v) => {
                *out = v;
                VlcStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Standard Gaussian cdf.
#[no_mangle]
pub extern "C" fn vlc_gaussian_cdf(u: f64) -> f64 {
    gaussian::cdf(u)
}

/// Standard Gaussian upper tail Q(u) = 1 - cdf(u), tail-stable.
#[no_mangle]
pub extern "C" fn vlc_gaussian_tail(u: f64) -> f64 {
    gaussian::tail(u)
}

/// Standard Gaussian density.
#[no_mangle]
pub extern "C" fn vlc_gaussian_pdf(u: f64) -> f64 {
    gaussian::pdf(u)
}

/// Gaussian quantile; -inf/+inf at 0 and 1, domain error outside [0, 1].
///
/// # Safety
/// `out` must be non-null.
#[no_mangle]
pub unsafe extern "C" fn vlc_gaussian_inv_cdf(s: f64, out: *mut f64) -> VlcStatus {
    guarded(|| {
        nonnull!(out);
        match gaussian::inv_cdf(s) {
            Ok(v) => {
                *out = v;
                VlcStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Solves Lambda'(s) = a for the counting-measure tilt and returns the
/// root and the Fenchel-Legendre value Lambda*(a), both in nats.
///
/// # Safety
/// `src` must be a live handle; `out_s` and `out_rate` non-null.
#[no_mangle]
pub unsafe extern "C" fn vlc_rate_function(
    src: *const VlcSource,
    a: f64,
    out_s: *mut f64,
    out_rate: *mut f64,
) -> VlcStatus {
    guarded(|| {
        nonnull!(src, out_s, out_rate);
        match large_dev::rate_function(&(*src).inner, a) {
            Ok((s, rate)) => {
                *out_s = s;
                *out_rate = rate;
                VlcStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Bahadur-Rao approximation at tilt `s` (tail or lattice-atom variant).
///
/// # Safety
/// `src` must be a live handle; `out` non-null.
#[no_mangle]
pub unsafe extern "C" fn vlc_bahadur_rao(
    src: *const VlcSource,
    n: u64,
    s: f64,
    variant: VlcBrVariant,
    out: *mut VlcSldApprox,
) -> VlcStatus {
    guarded(|| {
        nonnull!(src, out);
        let variant = match variant {
            VlcBrVariant::Tail => BrVariant::Tail,
            VlcBrVariant::Atom => BrVariant::Atom,
        };
        match large_dev::bahadur_rao(&(*src).inner, n, s, variant) {
            Ok(a) => {
                *out = VlcSldApprox {
                    log_value: a.log_value,
                    exponent: a.exponent,
                    prefactor_log: a.prefactor_log,
                };
                VlcStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Perturbed strong-large-deviations approximation with threshold shift `a_n`.
///
/// # Safety
/// `src` must be a live handle; `out` non-null.
#[no_mangle]
pub unsafe extern "C" fn vlc_sld_perturbed(
    src: *const VlcSource,
    n: u64,
    s: f64,
    a_n: f64,
    out: *mut VlcSldApprox,
) -> VlcStatus {
    guarded(|| {
        nonnull!(src, out);
        match large_dev::sld_perturbed(&(*src).inner, n, s, a_n) {
            Ok(a) => {
                *out = VlcSldApprox {
                    log_value: a.log_value,
                    exponent: a.exponent,
                    prefactor_log: a.prefactor_log,
                };
                VlcStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}
