#ifndef VLC_LIMITS_H
#define VLC_LIMITS_H

/* Auto-generated by cbindgen from vlc-limits-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Which mass a strong-large-deviations approximation targets.
typedef enum VlcBrVariant {
  VLC_BR_VARIANT_TAIL = 0,
  VLC_BR_VARIANT_ATOM = 1,
} VlcBrVariant;

// Coefficient convention for the moderate-deviations block expansion.
typedef enum VlcMdConvention {
  VLC_MD_CONVENTION_BITS_PAPER = 0,
  VLC_MD_CONVENTION_NATS_CONVERTED = 1,
} VlcMdConvention;

// Result of every fallible call.
typedef enum VlcStatus {
  VLC_STATUS_OK = 0,
  VLC_STATUS_NULL_POINTER = 1,
  VLC_STATUS_INVALID_UTF8 = 2,
  VLC_STATUS_PARSE_ERROR = 3,
  VLC_STATUS_DOMAIN_ERROR = 4,
  VLC_STATUS_BUDGET_EXCEEDED = 5,
  VLC_STATUS_SIZE_CAP_EXCEEDED = 6,
  VLC_STATUS_PANIC = 7,
} VlcStatus;

// Opaque handle: the level distribution of X^n for one source.
typedef struct VlcLevels VlcLevels;

// Opaque handle: a finite memoryless source with exact-rational pmf.
typedef struct VlcSource VlcSource;

// Strong-large-deviations approximation, all fields in nats:
// log_value = -exponent + prefactor_log.
typedef struct VlcSldApprox {
  double log_value;
  double exponent;
  double prefactor_log;
} VlcSldApprox;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread. Valid until the next
// failing call; do not free.
const char *vlc_last_error(void);

// Library version as a static string; do not free.
const char *vlc_version(void);

// Parses a source from its JSON spec:
// `{"symbols": ["a", "b"], "probs": ["3/10", "7/10"]}`.
//
// # Safety
// `json` must be a valid NUL-terminated string; `out` must be non-null.
enum VlcStatus vlc_source_from_json(const char *json, struct VlcSource **out);

// Releases a source handle. Null is a no-op.
//
// # Safety
// `src` must come from `vlc_source_from_json` and not be freed twice.
void vlc_source_free(struct VlcSource *src);

// Entropy (bits), varentropy (bits^2), and the skewness term of the
// information density. The skewness term is NaN for uniform sources,
// where it is undefined.
//
// # Safety
// All pointers must be non-null; `src` must be a live handle.
enum VlcStatus vlc_source_info_moments(const struct VlcSource *src,
                                       double *entropy,
                                       double *varentropy,
                                       double *skew_sixth);

// (log2 of the support size, min-entropy), both in bits.
//
// # Safety
// All pointers must be non-null; `src` must be a live handle.
enum VlcStatus vlc_source_support_entropies(const struct VlcSource *src, double *h0, double *h_inf);

// Renyi entropy of order `alpha >= 0`, bits.
//
// # Safety
// `src` must be a live handle; `out` non-null.
enum VlcStatus vlc_source_renyi_entropy(const struct VlcSource *src, double alpha, double *out);

// Maximal lattice span of log2 P(X) in bits; 0 for nonlattice sources.
//
// # Safety
// `src` must be a live handle; `out` non-null.
enum VlcStatus vlc_source_lattice_span(const struct VlcSource *src, double *out);

// Enumerates the level distribution of X^n (up to `budget` type classes;
// pass 0 for the default budget of 10^7).
//
// # Safety
// `src` must be a live handle; `out` non-null.
enum VlcStatus vlc_levels_enumerate(const struct VlcSource *src,
                                    uint32_t n,
                                    uint64_t budget,
                                    struct VlcLevels **out);

// Releases a level-distribution handle. Null is a no-op.
//
// # Safety
// `levels` must come from `vlc_levels_enumerate` and not be freed twice.
void vlc_levels_free(struct VlcLevels *levels);

// Releases a string returned by this library. Null is a no-op.
//
// # Safety
// `s` must come from a `_string` function of this library.
void vlc_string_free(char *s);

// M*(n, eps) as a decimal string (exact big integer).
//
// # Safety
// `levels` must be a live handle; `out` non-null. Free the string with
// `vlc_string_free`.
enum VlcStatus vlc_m_star_string(const struct VlcLevels *levels,
                                 uint64_t eps_num,
                                 uint64_t eps_den,
                                 char **out);

// log2 of M*(n, eps); -inf when M* = 0 (eps = 1).
//
// # Safety
// `levels` must be a live handle; `out` non-null.
enum VlcStatus vlc_log2_m_star(const struct VlcLevels *levels,
                               uint64_t eps_num,
                               uint64_t eps_den,
                               double *out);

// L*(eps | X^n) in bits.
//
// # Safety
// `levels` must be a live handle; `out` non-null.
enum VlcStatus vlc_l_star(const struct VlcLevels *levels,
                          uint64_t eps_num,
                          uint64_t eps_den,
                          double *out);

// L*(eps | X^n) as an exact rational string "num/den".
//
// # Safety
// `levels` must be a live handle; `out` non-null. Free the string with
// `vlc_string_free`.
enum VlcStatus vlc_l_star_string(const struct VlcLevels *levels,
                                 uint64_t eps_num,
                                 uint64_t eps_den,
                                 char **out);

// Information-density quantile eta_n(eps) in nats.
//
// # Safety
// `levels` must be a live handle; `out` non-null.
enum VlcStatus vlc_eta_quantile_nats(const struct VlcLevels *levels,
                                     uint64_t eps_num,
                                     uint64_t eps_den,
                                     double *out);

// Exact quantile of the normalized centered information density.
//
// # Safety
// `src` and `levels` must be live handles over the same source; `out`
// non-null.
enum VlcStatus vlc_zeta_quantile(const struct VlcSource *src,
                                 const struct VlcLevels *levels,
                                 uint64_t eps_num,
                                 uint64_t eps_den,
                                 double *out);

// Zero-error variable-length expansion nH - (1/2) log2 n, bits.
//
// # Safety
// `src` must be a live handle; `out` non-null.
enum VlcStatus vlc_vl_zero_error(const struct VlcSource *src, uint64_t n, double *out);

// Moderate-deviations block expansion of log2 M*(n, eps_n) under the
// chosen coefficient convention, bits.
//
// # Safety
// `src` must be a live handle; `out` non-null.
enum VlcStatus vlc_fl_md_expansion(const struct VlcSource *src,
                                   uint64_t n,
                                   double eps,
                                   enum VlcMdConvention convention,
                                   double *out);

// Standard Gaussian cdf.
double vlc_gaussian_cdf(double u);

// Standard Gaussian upper tail Q(u) = 1 - cdf(u), tail-stable.
double vlc_gaussian_tail(double u);

// Standard Gaussian density.
double vlc_gaussian_pdf(double u);

// Gaussian quantile; -inf/+inf at 0 and 1, domain error outside [0, 1].
//
// # Safety
// `out` must be non-null.
enum VlcStatus vlc_gaussian_inv_cdf(double s, double *out);

// Solves Lambda'(s) = a for the counting-measure tilt and returns the
// root and the Fenchel-Legendre value Lambda*(a), both in nats.
//
// # Safety
// `src` must be a live handle; `out_s` and `out_rate` non-null.
enum VlcStatus vlc_rate_function(const struct VlcSource *src,
                                 double a,
                                 double *out_s,
                                 double *out_rate);

// Bahadur-Rao approximation at tilt `s` (tail or lattice-atom variant).
//
// # Safety
// `src` must be a live handle; `out` non-null.
enum VlcStatus vlc_bahadur_rao(const struct VlcSource *src,
                               uint64_t n,
                               double s,
                               enum VlcBrVariant variant,
                               struct VlcSldApprox *out);

// Perturbed strong-large-deviations approximation with threshold shift `a_n`.
//
// # Safety
// `src` must be a live handle; `out` non-null.
enum VlcStatus vlc_sld_perturbed(const struct VlcSource *src,
                                 uint64_t n,
                                 double s,
                                 double a_n,
                                 struct VlcSldApprox *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* VLC_LIMITS_H */
