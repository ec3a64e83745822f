#ifndef HOPFCERT_H
#define HOPFCERT_H

/* Generated by cbindgen from crates/ffi/src. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum HcStatus {
  HC_STATUS_OK = 0,
  HC_STATUS_NULL_POINTER = 1,
  HC_STATUS_INVALID_INPUT = 2,
  HC_STATUS_DIMENSION = 3,
  HC_STATUS_CAPACITY = 4,
  HC_STATUS_NON_CONVERGENCE = 5,
  HC_STATUS_INCONSISTENCY = 6,
  HC_STATUS_DOMAIN = 7,
  HC_STATUS_PARSE = 8,
  HC_STATUS_NOT_CONTRACTIVE = 9,
  HC_STATUS_UTF8 = 10,
  HC_STATUS_PANIC = 11,
} HcStatus;

/*
 Outcome of a certificate.
 */
typedef enum HcVerdictKind {
  HC_VERDICT_KIND_CONFIRMED = 0,
  HC_VERDICT_KIND_CONFIRMED_WITH_WARNINGS = 1,
  HC_VERDICT_KIND_REFUTED = 2,
  HC_VERDICT_KIND_INCONSISTENT = 3,
} HcVerdictKind;

/*
 Opaque model handle.
 */
typedef struct HcModel HcModel;

/*
 Opaque moment-oracle handle.
 */
typedef struct HcOracle HcOracle;

/*
 Opaque certificate handle.
 */
typedef struct HcReport HcReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 ABI version as `major * 10000 + minor * 100 + patch`.
 */
uint32_t hc_version(void);

/*
 Message of the last failed call on this thread, or NULL.
 The pointer stays valid until the next `hc_*` call on the same thread.
 */
const char *hc_last_error_message(void);

/*
 Releases a string returned by this library. NULL is ignored.

 # Safety
 `s` must come from this library and not have been freed.
 */
void hc_string_free(char *s);

/*
 Parses a model JSON document.

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum HcStatus hc_model_from_json(const char *json, struct HcModel **out);

/*
 Model of `C(S_n)` evaluated at `num_points` permutations.
 `images` holds `num_points * n` 1-based images, one permutation after another.

 # Safety
 `images` must point to `num_points * n` readable values; `out` must be writable.
 */
enum HcStatus hc_model_from_permutations(size_t n,
                                         const uint32_t *images,
                                         size_t num_points,
                                         struct HcModel **out);

/*
 Model of the Fourier matrix `F_n`.

 # Safety
 `out` must be writable.
 */
enum HcStatus hc_model_from_fourier(size_t n, double tol, struct HcModel **out);

/*
 Serializes a model; free the result with [`hc_string_free`].

 # Safety
 `model` must be a live handle; `out` must be writable.
 */
enum HcStatus hc_model_to_json(const struct HcModel *model, char **out);

/*
 `n` of the model, or 0 for NULL.

 # Safety
 `model` must be NULL or a live handle.
 */
size_t hc_model_n(const struct HcModel *model);

/*
 `d` of the model, or 0 for NULL.

 # Safety
 `model` must be NULL or a live handle.
 */
size_t hc_model_d(const struct HcModel *model);

/*
 Counts violated model invariants; 0 means valid.

 # Safety
 `model` must be a live handle; `out_violations` must be writable.
 */
enum HcStatus hc_model_validate(const struct HcModel *model, double tol, size_t *out_violations);

/*
 # Safety
 `model` must be NULL or a handle not yet freed.
 */
void hc_model_free(struct HcModel *model);

/*
 Parses an oracle descriptor.

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum HcStatus hc_oracle_from_json(const char *json, struct HcOracle **out);

/*
 `c_k = h(χ^k)` as a decimal string (`"14"` or `"7/2"`); free with [`hc_string_free`].

 # Safety
 `oracle` must be a live handle; `out` must be writable.
 */
enum HcStatus hc_oracle_character_moment(const struct HcOracle *oracle, size_t k, char **out);

/*
 # Safety
 `oracle` must be NULL or a handle not yet freed.
 */
void hc_oracle_free(struct HcOracle *oracle);

/*
 `#(1 ∈ T_k)`, counted by kernel rank and by the Cesàro projector; the
 two must agree. `max_dim = 0` selects the default capacity.

 # Safety
 `model` must be a live handle; the out pointers must be writable.
 */
enum HcStatus hc_multiplicity(const struct HcModel *model,
                              size_t k,
                              double tol,
                              size_t max_dim,
                              size_t *out_count,
                              bool *out_marginal);

/*
 Value of the Cesàro-limit idempotent state on `u_{i_1 j_1}···u_{i_k j_k}`,
 with 1-based `rows[t] = i_t` and `cols[t] = j_t`.

 # Safety
 `rows` and `cols` must point to `len` readable values; the out pointers must be writable.
 */
enum HcStatus hc_idempotent_eval(const struct HcModel *model,
                                 const uint32_t *rows,
                                 const uint32_t *cols,
                                 size_t len,
                                 double tol,
                                 size_t max_dim,
                                 double *out_re,
                                 double *out_im);

/*
 Certifies the model against the oracle up to `k_max`.

 # Safety
 `model` and `oracle` must be live handles; `out` must be writable.
 */
enum HcStatus hc_certify(const struct HcModel *model,
                         const struct HcOracle *oracle,
                         size_t k_max,
                         double tol,
                         size_t max_dim,
                         struct HcReport **out);

/*
 Number of level records, or 0 for NULL.

 # Safety
 `report` must be NULL or a live handle.
 */
size_t hc_report_num_levels(const struct HcReport *report);

/*
 Level record `index` (0-based). Fails with `INVALID_INPUT` when `c_k` does not fit in 64 bits.

 # Safety
 `report` must be a live handle; the out pointers must be writable.
 */
enum HcStatus hc_report_level(const struct HcReport *report,
                              size_t index,
                              size_t *out_k,
                              size_t *out_m,
                              uint64_t *out_c,
                              bool *out_marginal);

/*
 Verdict kind and its level (`k_max` when confirmed, the deciding `k` otherwise).

 # Safety
 `report` must be a live handle; the out pointers must be writable.
 */
enum HcStatus hc_report_verdict(const struct HcReport *report,
                                enum HcVerdictKind *out_kind,
                                size_t *out_k);

/*
 The report as JSON, identical to the CLI's `--format json`; free with [`hc_string_free`].

 # Safety
 `report` must be a live handle; `out` must be writable.
 */
enum HcStatus hc_report_to_json(const struct HcReport *report, char **out);

/*
 # Safety
 `report` must be NULL or a handle not yet freed.
 */
void hc_report_free(struct HcReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOPFCERT_H */
