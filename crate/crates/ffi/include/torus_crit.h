#ifndef TORUS_CRIT_H
#define TORUS_CRIT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

#define TC_OK 0

#define TC_INCONSISTENT 2

#define TC_TOLERANCE 3

#define TC_BAD_INPUT 4

#define TC_DOMAIN 5

#define TC_IO 6

#define TC_NULL_POINTER 7

#define TC_PANIC 8

/**
 * Opaque solution family.
 */
typedef struct TcSolution TcSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next library call on the same thread.
 */
const char *tc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tc_version(void);

/**
 * Critical ratio `a²/r²` of the degree-`n` pure-H density, as a fraction.
 *
 * # Safety
 * `num` and `den` must be valid for writes.
 */
int32_t tc_constraint_ratio(uint32_t n, int64_t *num, int64_t *den);

/**
 * Solves the degree-`n` pure-H family for the small radius `r` (`"p/q"`).
 *
 * # Safety
 * `r` must be a NUL-terminated string and `out` valid for writes.
 */
int32_t tc_solve_pure_h(uint32_t n, const char *r, struct TcSolution **out);

/**
 * Solves the degree-`n` family with K-terms at fixed radii. `terms` holds
 * `n_terms` pairs `(k, m)` for `H^k K^m`; pass NULL and 0 for the default
 * term set. A family in which `a1` is forced to zero is still returned,
 * with status `TC_INCONSISTENT`.
 *
 * # Safety
 * `a2` and `r` must be NUL-terminated strings, `terms` must point to
 * `2 * n_terms` readable values when non-null, and `out` valid for writes.
 */
int32_t tc_solve_with_gauss(uint32_t n,
                            const char *a2,
                            const char *r,
                            const uint32_t *terms,
                            uintptr_t n_terms,
                            struct TcSolution **out);

/**
 * 1 if `a1` is free in the family, 0 if it is forced to zero, -1 on NULL.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
int32_t tc_solution_is_consistent(const struct TcSolution *s);

/**
 * Number of free parameters, or -1 on NULL.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
int64_t tc_solution_free_count(const struct TcSolution *s);

/**
 * The forced ratio as `"p/q"`, or NULL when the family has none.
 *
 * # Safety
 * `s` must be NULL or a live handle. Free the result with `tc_string_free`.
 */
char *tc_solution_constraint(const struct TcSolution *s);

/**
 * The family as a JSON report.
 *
 * # Safety
 * `s` must be a live handle and `out` valid for writes. Free the string
 * with `tc_string_free`.
 */
int32_t tc_solution_to_json(const struct TcSolution *s, char **out);

/**
 * Verifies the family on its own torus with free parameters `1, 2, 3, …`.
 * Returns `TC_TOLERANCE` when the residual is not exactly zero or the grid
 * residual exceeds `1e-8`.
 *
 * # Safety
 * `s` must be a live handle; `exact` and `numeric` valid for writes.
 */
int32_t tc_solution_verify(const struct TcSolution *s, int32_t *exact, double *numeric);

/**
 * Mean and Gaussian curvature of the torus `(a, r)` at angle `u`.
 *
 * # Safety
 * `h` and `k` must be valid for writes.
 */
int32_t tc_curvatures(double a, double r, double u, double *h, double *k);

/**
 * Energy of the zero-pressure degree-`n` family with `a1 = 1` on the torus
 * with `a² = ratio · r²`, by quadrature on `grid` nodes.
 *
 * # Safety
 * `ratio` and `r` must be NUL-terminated strings; `out` valid for writes.
 */
int32_t tc_family_energy(uint32_t n, const char *ratio, const char *r, uintptr_t grid, double *out);

/**
 * Releases a solution handle. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a handle not yet freed.
 */
void tc_solution_free(struct TcSolution *s);

/**
 * Releases a string returned by the library. NULL is ignored.
 *
 * # Safety
 * `p` must be NULL or a string from this library not yet freed.
 */
void tc_string_free(char *p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORUS_CRIT_H */
