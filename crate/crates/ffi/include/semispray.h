#ifndef SEMISPRAY_H
#define SEMISPRAY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SsStatus {
  SS_STATUS_OK = 0,
  SS_STATUS_NULL_POINTER = 1,
  SS_STATUS_INVALID_UTF8 = 2,
  SS_STATUS_PARSE = 3,
  SS_STATUS_DIMENSION = 4,
  SS_STATUS_INVALID_ARGUMENT = 5,
  SS_STATUS_SINGULAR_METRIC = 6,
  SS_STATUS_INCONCLUSIVE = 7,
  SS_STATUS_PANIC = 8,
} SsStatus;

typedef enum SsVerdict {
  SS_VERDICT_LAGRANGIAN_CONFIRMED = 0,
  SS_VERDICT_FORMALLY_INTEGRABLE_CLASS = 1,
  SS_VERDICT_OBSTRUCTION_FAILS = 2,
  SS_VERDICT_HELMHOLTZ_FAILS = 3,
  SS_VERDICT_INCONCLUSIVE = 4,
} SsVerdict;

// Opaque semi-basic 1-form handle.
typedef struct SsForm SsForm;

// Opaque semispray handle.
typedef struct SsSemispray SsSemispray;

typedef struct SsClassification {
  bool is_flat;
  bool is_isotropic;
} SsClassification;

// One row of the symbol table.
typedef struct SsSymbolDims {
  size_t n;
  size_t dim_g1;
  size_t dim_g2;
  size_t dim_k;
  bool exact;
  bool all_match;
} SsSymbolDims;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until
// the next call into the library on the same thread.
const char *ss_last_error(void);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void ss_string_free(char *s);

// Builds `S` from `n` coefficient strings `G¹..Gⁿ`.
//
// # Safety
// `g` must point to `n` valid C strings; `out` must be writable.
enum SsStatus ss_semispray_new(size_t n, const char *const *g, struct SsSemispray **out);

// Derives `S` from a regular Lagrangian (`n <= 3`).
//
// # Safety
// `l` must be a valid C string; `out` must be writable.
enum SsStatus ss_semispray_from_lagrangian(size_t n,
                                           const char *l,
                                           uint64_t seed,
                                           struct SsSemispray **out);

// # Safety
// `s` must be null or a handle from this library that has not been freed.
void ss_semispray_free(struct SsSemispray *s);

// Dimension `n`, or 0 for a null handle.
//
// # Safety
// `s` must be null or a live handle.
size_t ss_semispray_dim(const struct SsSemispray *s);

// Coefficient `G^(i+1)` as a string, to be freed with [`ss_string_free`].
//
// # Safety
// `s` must be a live handle; `out` must be writable.
enum SsStatus ss_semispray_coefficient(const struct SsSemispray *s, size_t i, char **out);

// Jacobi endomorphism component `R^(i+1)_(j+1)` as a string.
//
// # Safety
// `s` must be a live handle; `out` must be writable.
enum SsStatus ss_semispray_jacobi(const struct SsSemispray *s, size_t i, size_t j, char **out);

// # Safety
// `s` must be a live handle; `out` must be writable.
enum SsStatus ss_semispray_classify(const struct SsSemispray *s,
                                    uint64_t seed,
                                    struct SsClassification *out);

// Builds `θ = θ₀ dt + θᵢ δxⁱ` from `theta0` and `n` strings `theta`.
//
// # Safety
// `theta0` and the `n` entries of `theta` must be valid C strings; `out` must be writable.
enum SsStatus ss_form_new(size_t n,
                          const char *theta0,
                          const char *const *theta,
                          struct SsForm **out);

// # Safety
// `f` must be null or a handle from this library that has not been freed.
void ss_form_free(struct SsForm *f);

// Verdict for a candidate form `θ`, or from the class of `S` when `theta` is null.
//
// # Safety
// `s` must be a live handle, `theta` null or a live handle, `out` writable.
enum SsStatus ss_check_theta(const struct SsSemispray *s,
                             const struct SsForm *theta,
                             uint64_t seed,
                             enum SsVerdict *out);

// Verdict for a Lagrangian `L` against `S`.
//
// # Safety
// `s` must be a live handle, `l` a valid C string, `out` writable.
enum SsStatus ss_verify_lagrangian(const struct SsSemispray *s,
                                   const char *l,
                                   uint64_t seed,
                                   enum SsVerdict *out);

// Exact symbol dimensions for one `n`.
//
// # Safety
// `out` must be writable.
enum SsStatus ss_symbol_dims(size_t n, struct SsSymbolDims *out);

// RK4 geodesic from `start = (t, x¹..xⁿ, y¹..yⁿ)`; writes the trajectory
// export text to `out`.
//
// # Safety
// `s` must be a live handle, `start` must point to `2n + 1` doubles, `out` writable.
enum SsStatus ss_geodesic(const struct SsSemispray *s,
                          const double *start,
                          double step,
                          size_t steps,
                          char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEMISPRAY_H */
