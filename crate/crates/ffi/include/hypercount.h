/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef HYPERCOUNT_H
#define HYPERCOUNT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes. The error values match the CLI exit codes where they overlap.
 */
typedef enum HcStatus {
  HC_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  HC_STATUS_NULL_POINTER = 1,
  /*
   Parameters outside the valid domain, or malformed input.
   */
  HC_STATUS_DOMAIN = 2,
  /*
   The work budget or retry limit was exceeded.
   */
  HC_STATUS_BUDGET = 3,
  /*
   A verification clause failed or a computation was unstable.
   */
  HC_STATUS_CHECK = 4,
  /*
   A string argument was not valid UTF-8.
   */
  HC_STATUS_INVALID_UTF8 = 5,
  /*
   An internal panic was caught at the boundary.
   */
  HC_STATUS_PANIC = 6,
} HcStatus;

/*
 Counting route, mirroring the CLI `--method` values.
 */
typedef enum HcMethod {
  HC_METHOD_AUTO = 0,
  HC_METHOD_BRUTE = 1,
  HC_METHOD_DP = 2,
  HC_METHOD_DFT = 3,
  HC_METHOD_INTEGRAL = 4,
} HcMethod;

/*
 Verification suite, mirroring the CLI `--suite` values.
 */
typedef enum HcSuite {
  HC_SUITE_ALL = 0,
  HC_SUITE_LINEAR = 1,
  HC_SUITE_DET = 2,
  HC_SUITE_MOMENTS = 3,
  HC_SUITE_TAYLOR = 4,
  HC_SUITE_SYMMETRY = 5,
} HcSuite;

/*
 Opaque d-regular r-partite hypergraph.
 */
typedef struct HcHypergraph HcHypergraph;

/*
 Opaque instance parameters `(r, m, d)`.
 */
typedef struct HcParams HcParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the most recent failure on this thread, or null. The pointer
 stays valid until the next `hc_*` call on the same thread.
 */
const char *hc_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *hc_version(void);

/*
 Release a string returned by this library. Null is ignored.

 # Safety
 `s` must be null or a pointer produced by this library and not yet freed.
 */
void hc_string_free(char *s);

/*
 Validate `(r, m, d)` with `r >= 2`, `m >= 1`, `d <= m^(r-1)`.

 # Safety
 `out` must be a valid pointer to writable storage.
 */
enum HcStatus hc_params_new(uint32_t r, uint32_t m, uint64_t d, struct HcParams **out);

/*
 Like [`hc_params_new`] but allows `d > m^(r-1)`; only the simplicity
 probability accepts such parameters.

 # Safety
 `out` must be a valid pointer to writable storage.
 */
enum HcStatus hc_params_new_multigraph(uint32_t r, uint32_t m, uint64_t d, struct HcParams **out);

/*
 Release parameters. Null is ignored.

 # Safety
 `p` must be null or a handle from `hc_params_new*` not yet freed.
 */
void hc_params_free(struct HcParams *p);

/*
 Count d-regular instances. `budget` of 0 uses the default (or
 `HYPERCOUNT_BUDGET`). `out_exact` receives the decimal count, or null for
 the quadrature route; it may itself be null if only the log is wanted.

 # Safety
 `p` must be a live handle; `out_log` must be writable; `out_exact` null or writable.
 */
enum HcStatus hc_count(const struct HcParams *p,
                       enum HcMethod method,
                       uint64_t budget,
                       double *out_log,
                       char **out_exact);

/*
 Natural log of the naive estimate.

 # Safety
 `p` must be a live handle and `out` writable.
 */
enum HcStatus hc_log_naive(const struct HcParams *p, double *out);

/*
 Natural log of the dense-regime estimate; domain error when it does not
 apply (`d = 0` or `d = m^(r-1)`).

 # Safety
 `p` must be a live handle and `out` writable.
 */
enum HcStatus hc_log_dense(const struct HcParams *p, double *out);

/*
 Every applicable estimate, plus the exact count when it fits `budget`
 (0 for the default), as a JSON object.

 # Safety
 `p` must be a live handle and `out_json` writable.
 */
enum HcStatus hc_estimate_json(const struct HcParams *p, uint64_t budget, char **out_json);

/*
 Probability that a uniform configuration is simple: exact when the
 configuration space is small, otherwise Monte Carlo with `samples` draws.
 `out_std_err` is 0 for exact results.

 # Safety
 `p` must be a live handle; the out-pointers must be writable.
 */
enum HcStatus hc_simplicity_probability(const struct HcParams *p,
                                        uint64_t samples,
                                        uint64_t seed,
                                        double *out_p,
                                        double *out_std_err);

/*
 Draw a uniform d-regular instance by configuration-model rejection.

 # Safety
 `p` must be a live handle and `out` writable.
 */
enum HcStatus hc_sample(const struct HcParams *p,
                        uint64_t seed,
                        uint64_t max_tries,
                        struct HcHypergraph **out);

/*
 Number of edges of `g`.

 # Safety
 `g` must be a live handle and `out` writable.
 */
enum HcStatus hc_hypergraph_num_edges(const struct HcHypergraph *g, size_t *out);

/*
 1-based coordinates of edge `index` written to `coords`, which must hold
 `len >= r` entries.

 # Safety
 `g` must be a live handle and `coords` valid for `len` writes.
 */
enum HcStatus hc_hypergraph_edge(const struct HcHypergraph *g,
                                 size_t index,
                                 uint32_t *coords,
                                 size_t len);

/*
 `g` as `{"r","m","d","edges"}` JSON with 1-based coordinates.

 # Safety
 `g` must be a live handle and `out_json` writable.
 */
enum HcStatus hc_hypergraph_to_json(const struct HcHypergraph *g, char **out_json);

/*
 Release a hypergraph. Null is ignored.

 # Safety
 `g` must be null or a handle from [`hc_sample`] not yet freed.
 */
void hc_hypergraph_free(struct HcHypergraph *g);

/*
 Run a verification suite at density `lambda` (`"p/q"`, integer or
 decimal). A completed run returns OK even when clauses fail: check
 `out_passed`. `out_json` may be null.

 # Safety
 `lambda` must be a NUL-terminated string; `out_passed` writable;
 `out_json` null or writable.
 */
enum HcStatus hc_verify(uint32_t r,
                        uint32_t m,
                        const char *lambda,
                        enum HcSuite suite,
                        uint64_t seed,
                        bool *out_passed,
                        char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERCOUNT_H */
