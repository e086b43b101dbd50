#ifndef UMM_EDGE_H
#define UMM_EDGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes.
 */
typedef enum UmmStatus {
  UMM_STATUS_OK = 0,
  UMM_STATUS_NULL_POINTER = 1,
  UMM_STATUS_VALIDATION = 2,
  UMM_STATUS_DOMAIN = 3,
  UMM_STATUS_NUMERICAL = 4,
  UMM_STATUS_IO = 5,
  UMM_STATUS_PANIC = 6,
} UmmStatus;

/**
 * Opaque finite-n edge model: Verblunsky coefficients, kernel and edge constants.
 */
typedef struct UmmEdgeModel UmmEdgeModel;

/**
 * Opaque solved equilibrium problem.
 */
typedef struct UmmEquilibrium UmmEquilibrium;

/**
 * Edge constants of a solved equilibrium problem.
 */
typedef struct UmmEdgeConstants {
  double theta;
  double p_at_edge;
  double p_theta;
  double gamma;
  double a;
  double b;
  double a_operator;
  double edge_scale;
} UmmEdgeConstants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated, truncated to
 * `len`). Returns the full message length in bytes, 0 when there is none.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t umm_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *umm_version(void);

/**
 * Solves the one-cut equilibrium problem for `V(x) = Σ coeffs[k] x^k`.
 *
 * # Safety
 * `coeffs` must be valid for `len` reads; `out` must be a valid pointer.
 */
enum UmmStatus umm_equilibrium_new(const double *coeffs, size_t len, struct UmmEquilibrium **out);

/**
 * # Safety
 * `h` must be null or a handle from [`umm_equilibrium_new`] not yet freed.
 */
void umm_equilibrium_free(struct UmmEquilibrium *h);

/**
 * # Safety
 * `h` must be a live handle; `out` must be valid.
 */
enum UmmStatus umm_equilibrium_constants(const struct UmmEquilibrium *h,
                                         struct UmmEdgeConstants *out);

/**
 * Equilibrium density at angle `lambda`; zero outside the support.
 *
 * # Safety
 * `h` must be a live handle; `out` must be valid.
 */
enum UmmStatus umm_equilibrium_density(const struct UmmEquilibrium *h, double lambda, double *out);

/**
 * Builds the degree-`n` edge model for `V(x) = Σ coeffs[k] x^k` at the default precision.
 *
 * # Safety
 * `coeffs` must be valid for `len` reads; `out` must be a valid pointer.
 */
enum UmmStatus umm_edge_model_new(const double *coeffs,
                                  size_t len,
                                  size_t n,
                                  struct UmmEdgeModel **out);

/**
 * # Safety
 * `h` must be null or a handle from [`umm_edge_model_new`] not yet freed.
 */
void umm_edge_model_free(struct UmmEdgeModel *h);

/**
 * # Safety
 * `h` must be a live handle; `out` must be valid.
 */
enum UmmStatus umm_edge_model_constants(const struct UmmEdgeModel *h, struct UmmEdgeConstants *out);

/**
 * Half-width of the edge window in rescaled coordinates.
 *
 * # Safety
 * `h` must be a live handle; `out` must be valid.
 */
enum UmmStatus umm_edge_model_window(const struct UmmEdgeModel *h, double *out);

/**
 * Edge-rescaled finite-n kernel at `(x, y)`.
 *
 * # Safety
 * `h` must be a live handle; `out` must be valid.
 */
enum UmmStatus umm_edge_model_kernel(const struct UmmEdgeModel *h, double x, double y, double *out);

/**
 * Limit kernel at `(x, y)` for the model's edge constants.
 *
 * # Safety
 * `h` must be a live handle; `out` must be valid.
 */
enum UmmStatus umm_edge_model_limit_kernel(const struct UmmEdgeModel *h,
                                           double x,
                                           double y,
                                           double *out);

/**
 * Finite-n hole probability of the union of `count` rescaled intervals
 * `[bounds[2i], bounds[2i+1]]`, Nyström order `order` per interval.
 *
 * # Safety
 * `h` must be a live handle; `bounds` must be valid for `2 * count` reads; `out` must be valid.
 */
enum UmmStatus umm_edge_model_hole(const struct UmmEdgeModel *h,
                                   const double *bounds,
                                   size_t count,
                                   size_t order,
                                   double *out);

/**
 * Airy kernel `Q_Ai(x, y)`.
 *
 * # Safety
 * `out` must be valid.
 */
enum UmmStatus umm_airy_kernel(double x, double y, double *out);

/**
 * `det(1 − Q_Ai)` on the union of `count` intervals `[bounds[2i], bounds[2i+1]]`.
 *
 * # Safety
 * `bounds` must be valid for `2 * count` reads; `out` must be valid.
 */
enum UmmStatus umm_airy_gap(const double *bounds, size_t count, size_t order, double *out);

/**
 * Tracy–Widom `F₂(s)` with the default tail cut-off.
 *
 * # Safety
 * `out` must be valid.
 */
enum UmmStatus umm_tracy_widom(double s, size_t order, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UMM_EDGE_H */
