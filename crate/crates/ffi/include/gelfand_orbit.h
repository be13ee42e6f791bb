#ifndef GELFAND_ORBIT_H
#define GELFAND_ORBIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GorbStatus {
  GORB_STATUS_OK = 0,
  GORB_STATUS_NULL_POINTER = 1,
  GORB_STATUS_INVALID_ARGUMENT = 2,
  GORB_STATUS_SCHEMA = 3,
  GORB_STATUS_VALIDATION = 4,
  GORB_STATUS_NUMERIC = 5,
  GORB_STATUS_IO = 6,
  GORB_STATUS_PANIC = 7,
} GorbStatus;

// Opaque pair handle.
typedef struct GorbPair GorbPair;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a handle for a builtin pair (`heisenberg1`..`heisenberg4`, `u2su2`).
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum GorbStatus gorb_pair_builtin(const char *name, struct GorbPair **out);

// Loads and validates a pair file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum GorbStatus gorb_pair_load(const char *path, struct GorbPair **out);

// Parses a pair from JSON text without running validation.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum GorbStatus gorb_pair_from_json(const char *json, struct GorbPair **out);

// Releases a handle. Passing null is a no-op.
//
// # Safety
// `pair` must come from this library and not be used afterwards.
void gorb_pair_free(struct GorbPair *pair);

// Serializes a pair to JSON; free the result with [`gorb_string_free`].
//
// # Safety
// `pair` must be a live handle and `out` a valid pointer.
enum GorbStatus gorb_pair_to_json(const struct GorbPair *pair, char **out);

// Runs all structural checks. `passed` receives 1 or 0; on 0 the first
// failing check is available from [`gorb_last_error`].
//
// # Safety
// `pair` must be a live handle and `passed` a valid pointer.
enum GorbStatus gorb_pair_validate(const struct GorbPair *pair, int *passed);

// Writes `n = dim_C V`, `d = dim z` and the rank `r`; the invariant count is `r + 1`.
//
// # Safety
// `pair` must be a live handle; each out pointer must be valid.
enum GorbStatus gorb_pair_dims(const struct GorbPair *pair, size_t *n, size_t *d, size_t *r);

// Exact type I eigenvalue of invariant `index` at `λ = lambda_num / lambda_den`.
// The value is returned as a string such as `-5`, `1/2i` or `(1/2-3i)`, and
// numerically through `re` and `im` (either may be null).
//
// # Safety
// `m` must point to `m_len` values; `out` must be valid or null.
enum GorbStatus gorb_eigenvalue_type1(const struct GorbPair *pair,
                                      size_t index,
                                      int64_t lambda_num,
                                      int64_t lambda_den,
                                      const uint32_t *m,
                                      size_t m_len,
                                      double *re,
                                      double *im,
                                      char **out);

// Type II eigenvalue `p(ib, 0)`; `b` holds `2n` interleaved real and imaginary parts.
//
// # Safety
// `b` must point to `b_len` values; `re` and `im` must be valid.
enum GorbStatus gorb_eigenvalue_type2(const struct GorbPair *pair,
                                      size_t index,
                                      const double *b,
                                      size_t b_len,
                                      double *re,
                                      double *im);

// Eigenvalue vector of the type I parameter `(λ, m)`; `out` receives `r + 1` values.
//
// # Safety
// `m` must point to `m_len` values and `out` to at least `out_len`.
enum GorbStatus gorb_phi_embed_type1(const struct GorbPair *pair,
                                     double lambda,
                                     const uint32_t *m,
                                     size_t m_len,
                                     double *out,
                                     size_t out_len);

// Eigenvalue vector of the type II parameter `b` (`2n` interleaved values).
//
// # Safety
// `b` must point to `b_len` values and `out` to at least `out_len`.
enum GorbStatus gorb_phi_embed_type2(const struct GorbPair *pair,
                                     const double *b,
                                     size_t b_len,
                                     double *out,
                                     size_t out_len);

// Solves for the spherical point of `(λ, m)`. `v_out` receives `2n`
// interleaved values; the `z` component is `λA`.
//
// # Safety
// `m` must point to `m_len` values, `v_out` to at least `v_len`, and
// `residual` must be valid or null.
enum GorbStatus gorb_spherical_point(const struct GorbPair *pair,
                                     double lambda,
                                     const uint32_t *m,
                                     size_t m_len,
                                     uint64_t seed,
                                     double *v_out,
                                     size_t v_len,
                                     double *residual);

// Invariant values at the point `(v, t)`; `v` holds `2n` interleaved values
// and `t` holds `d`.
//
// # Safety
// Input pointers must cover their lengths and `out` at least `out_len`.
enum GorbStatus gorb_orbit_signature(const struct GorbPair *pair,
                                     const double *v,
                                     size_t v_len,
                                     const double *t,
                                     size_t t_len,
                                     double *out,
                                     size_t out_len);

// Message of the most recent failure on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *gorb_last_error(void);

// Releases a string returned by this library. Passing null is a no-op.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void gorb_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GELFAND_ORBIT_H */
