#ifndef WAVELAB_H
#define WAVELAB_H

/* Generated by cbindgen from crates/wavelab-ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Autonomous models of the stationary ODE.
 */
typedef enum WlStationaryModel {
  WL_STATIONARY_MODEL_CUBIC = 0,
  WL_STATIONARY_MODEL_PENDULUM_SIN = 1,
  WL_STATIONARY_MODEL_PENDULUM_SINH = 2,
} WlStationaryModel;

/**
 * Result codes of every fallible call.
 */
typedef enum WlStatus {
  WL_STATUS_OK = 0,
  WL_STATUS_NULL_POINTER = 1,
  WL_STATUS_INVALID_ARGUMENT = 2,
  WL_STATUS_ILL_POSED = 3,
  WL_STATUS_OUT_OF_RANGE = 4,
  WL_STATUS_DOMAIN = 5,
  WL_STATUS_ESCAPE = 6,
  WL_STATUS_NUMERICAL = 7,
  WL_STATUS_CONFIG = 8,
  WL_STATUS_IO = 9,
  WL_STATUS_BUFFER_TOO_SMALL = 10,
  WL_STATUS_PANIC = 11,
} WlStatus;

/**
 * Why an evolution stopped.
 */
typedef enum WlTermination {
  WL_TERMINATION_COMPLETED = 0,
  WL_TERMINATION_BLOWUP = 1,
  WL_TERMINATION_OVERFLOW = 2,
} WlTermination;

/**
 * Radial grid handle.
 */
typedef struct WlGrid WlGrid;

/**
 * Nonlinearity handle.
 */
typedef struct WlModel WlModel;

/**
 * Cauchy data (u, u_t) at one time.
 */
typedef struct WlState WlState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *wl_version(void);

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length excluding the NUL.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t wl_last_error_message(char *buf, size_t len);

/**
 * Creates a grid with `n` nodes on (0, r_max].
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum WlStatus wl_grid_new(size_t n, double r_max, struct WlGrid **out);

/**
 * # Safety
 * `grid` must be null or a handle from [`wl_grid_new`] not yet freed.
 */
void wl_grid_free(struct WlGrid *grid);

/**
 * Number of nodes, or 0 for a null handle.
 *
 * # Safety
 * `grid` must be null or a live grid handle.
 */
size_t wl_grid_len(const struct WlGrid *grid);

/**
 * Copies the radial nodes into `out`, which must hold `len` ≥ n values.
 *
 * # Safety
 * `grid` must be a live grid handle and `out` must point to `len` writable doubles.
 */
enum WlStatus wl_grid_nodes(const struct WlGrid *grid, double *out, size_t len);

/**
 * Parses a model from its JSON form, e.g. `{"kind": "cubic_focusing"}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid handle slot.
 */
enum WlStatus wl_model_from_json(const char *json, struct WlModel **out);

/**
 * # Safety
 * `model` must be null or a live model handle.
 */
void wl_model_free(struct WlModel *model);

/**
 * State from node values of u and u_t (`len` must equal the grid size).
 *
 * # Safety
 * `grid` must be live, `u` and `ut` must point to `len` doubles, `out` a valid slot.
 */
enum WlStatus wl_state_from_values(const struct WlGrid *grid,
                                   double t,
                                   const double *u,
                                   const double *ut,
                                   size_t len,
                                   struct WlState **out);

/**
 * Gaussian data (A e^{−r²/2w²}, 0) at t = 0.
 *
 * # Safety
 * `grid` must be live and `out` a valid slot.
 */
enum WlStatus wl_state_gaussian(const struct WlGrid *grid,
                                double amplitude,
                                double width,
                                struct WlState **out);

/**
 * # Safety
 * `state` must be null or a live state handle.
 */
void wl_state_free(struct WlState *state);

/**
 * Time of a state, NaN for a null handle.
 *
 * # Safety
 * `state` must be null or a live state handle.
 */
double wl_state_time(const struct WlState *state);

/**
 * Copies u and u_t into caller buffers holding at least the grid size.
 *
 * # Safety
 * `state` must be live; `u` and `ut` must point to `len` writable doubles.
 */
enum WlStatus wl_state_values(const struct WlState *state, double *u, double *ut, size_t len);

/**
 * ‖(u, u_t)‖ in Ḣ^{3/2} × Ḣ^{1/2}.
 *
 * # Safety
 * `state` must be live and `out` writable.
 */
enum WlStatus wl_critical_norm(const struct WlState *state, double *out);

/**
 * Conserved energy of a state under a model.
 *
 * # Safety
 * `model` and `state` must be live and `out` writable.
 */
enum WlStatus wl_energy(const struct WlModel *model, const struct WlState *state, double *out);

/**
 * Evolves `state` to `t_end` with the spectral splitting scheme. The final
 * state (the last one before blow-up, if detected) is returned in `out`.
 *
 * # Safety
 * `model` and `state` must be live; `out` and `termination` must be valid pointers.
 */
enum WlStatus wl_evolve(const struct WlModel *model,
                        const struct WlState *state,
                        double dt,
                        double t_end,
                        struct WlState **out,
                        enum WlTermination *termination);

/**
 * The stationary profile φ_ℓ(log r)/r at `n` radii; fails with
 * `WL_STATUS_ESCAPE` when a radius lies beyond the trajectory's escape point.
 *
 * # Safety
 * `radii` must point to `n` doubles and `out` to `n` writable doubles.
 */
enum WlStatus wl_stationary_profile(enum WlStationaryModel model,
                                    double ell,
                                    const double *radii,
                                    size_t n,
                                    double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WAVELAB_H */
