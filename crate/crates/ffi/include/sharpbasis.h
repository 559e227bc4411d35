#ifndef SHARPBASIS_H
#define SHARPBASIS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a call. Codes 2-4 match the command-line exit codes.
typedef enum SbStatus {
  SB_STATUS_OK = 0,
  SB_STATUS_USAGE = 2,
  SB_STATUS_INTEGRITY = 3,
  SB_STATUS_PRECISION = 4,
  SB_STATUS_NULL_ARGUMENT = 5,
  SB_STATUS_INVALID_UTF8 = 6,
  SB_STATUS_PANIC = 7,
} SbStatus;

// Memoized basis ladders.
typedef struct SbCache SbCache;

// A truncated q-series with exact rational coefficients.
typedef struct SbSeries SbSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static string.
const char *sb_version(void);

// Copy of the last error message of this thread, or NULL if none.
char *sb_last_error(void);

// # Safety
// `s` must come from this library or be NULL.
void sb_string_free(char *s);

// New cache; `dir` may be NULL for an in-memory cache. Returns NULL on
// error.
//
// # Safety
// `dir` must be NULL or a valid NUL-terminated string.
struct SbCache *sb_cache_new(const char *dir);

// Writes the cache's ladders to its directory, if it has one.
//
// # Safety
// `cache` must be a live handle.
enum SbStatus sb_cache_persist(const struct SbCache *cache);

// # Safety
// `cache` must come from `sb_cache_new` or be NULL.
void sb_cache_free(struct SbCache *cache);

// `f_{k,m}` (`space` = 'M') or `g_{k,m}` (`space` = 'S') of level
// `level`, truncated below `q^prec`.
//
// # Safety
// `cache` must be a live handle and `out` writable.
enum SbStatus sb_element(const struct SbCache *cache,
                         int64_t level,
                         int64_t weight,
                         char space,
                         int64_t m,
                         int64_t prec,
                         struct SbSeries **out);

// Expansion of an eta combination such as `"eta(2)^6 * eta(3)^8 *
// eta(6)^-10"` on level `level`, known below `q^prec`.
//
// # Safety
// `expr` must be a valid string and `out` writable.
enum SbStatus sb_eta_expand(uint64_t level, const char *expr, int64_t prec, struct SbSeries **out);

// # Safety
// `s` must be a live handle.
int64_t sb_series_valuation(const struct SbSeries *s);

// Exclusive precision bound.
//
// # Safety
// `s` must be a live handle.
int64_t sb_series_prec(const struct SbSeries *s);

// Coefficient of `q^n` as a decimal string (`"p/q"` if not integral).
//
// # Safety
// `s` must be a live handle and `out` writable.
enum SbStatus sb_series_coeff(const struct SbSeries *s, int64_t n, char **out);

// First `terms` nonzero terms, e.g. `"q^-1 + 6q + 4q^2 - 3q^3"`.
//
// # Safety
// `s` must be a live handle and `out` writable.
enum SbStatus sb_series_render(const struct SbSeries *s, size_t terms, char **out);

// JSON form of the series.
//
// # Safety
// `s` must be a live handle and `out` writable.
enum SbStatus sb_series_to_json(const struct SbSeries *s, char **out);

// # Safety
// `s` must come from this library or be NULL.
void sb_series_free(struct SbSeries *s);

// Runs the duality check on `m <= m_max`, `n <= n_max`. `passed` gets 1 or
// 0; `report_json`, if not NULL, gets the full report.
//
// # Safety
// `cache` must be a live handle, `passed` writable, `report_json` NULL or
// writable.
enum SbStatus sb_verify_duality(const struct SbCache *cache,
                                int64_t level,
                                int64_t weight,
                                int64_t m_max,
                                int64_t n_max,
                                int *passed,
                                char **report_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHARPBASIS_H */
