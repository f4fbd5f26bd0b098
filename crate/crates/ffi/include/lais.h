#ifndef LAIS_H
#define LAIS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum LaisStatus {
  LAIS_STATUS_OK = 0,
  LAIS_STATUS_INVALID_ARGUMENT = 1,
  LAIS_STATUS_CONFIG = 2,
  LAIS_STATUS_ORACLE = 3,
  LAIS_STATUS_DEGENERATE_WEIGHTS = 4,
  LAIS_STATUS_IO = 5,
  LAIS_STATUS_NULL_POINTER = 6,
  LAIS_STATUS_PANIC = 7,
} LaisStatus;

typedef struct LaisMeasure LaisMeasure;

typedef struct LaisPotential LaisPotential;

typedef struct LaisSchedule LaisSchedule;

typedef struct LaisSpectrum LaisSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Length in bytes of the last error message on this thread, excluding the NUL; 0 if none.
 */
size_t lais_last_error_length(void);

/**
 * Copies the last error message into `buf` (NUL-terminated, truncated to
 * `len - 1` bytes). Returns the number of bytes written, excluding the NUL.
 *
 * # Safety
 * `buf` must point to `len` writable bytes.
 */
size_t lais_last_error_message(char *buf, size_t len);

/**
 * Builds a named landscape (`double_well_1d`, `double_well_2d`, `flat_1d`).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum LaisStatus lais_potential_new(const char *name,
                                   double asymmetry,
                                   struct LaisPotential **out_handle);

/**
 * # Safety
 * `p` must come from [`lais_potential_new`] and not be used afterwards.
 */
void lais_potential_free(struct LaisPotential *p);

/**
 * Dimension of the torus; 0 for NULL.
 *
 * # Safety
 * `p` must be NULL or a live handle.
 */
size_t lais_potential_dim(const struct LaisPotential *p);

/**
 * `U(x)` for a point of `dim` coordinates.
 *
 * # Safety
 * `x` must point to `dim` values; `out_value` must be writable.
 */
enum LaisStatus lais_potential_energy(const struct LaisPotential *p,
                                      const double *x,
                                      size_t dim,
                                      double *out_value);

/**
 * `log Z_ε` by periodic trapezoid quadrature on `n_points` nodes per axis.
 *
 * # Safety
 * `p` must be a live handle; `out_value` must be writable.
 */
enum LaisStatus lais_quadrature_log_z(const struct LaisPotential *p,
                                      double eps,
                                      size_t n_points,
                                      double *out_value);

/**
 * Ladder from `eps_1` down to `eps_target` with `K = ⌈1/(ε ν)⌉` transitions.
 *
 * # Safety
 * `out_handle` must be writable.
 */
enum LaisStatus lais_schedule_new(double eps_target,
                                  double eps_1,
                                  double nu,
                                  struct LaisSchedule **out_handle);

/**
 * # Safety
 * `s` must come from [`lais_schedule_new`] and not be used afterwards.
 */
void lais_schedule_free(struct LaisSchedule *s);

/**
 * Number of transitions `K`; 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
size_t lais_schedule_transitions(const struct LaisSchedule *s);

/**
 * Copies the `K + 1` temperatures into `out_levels`.
 *
 * # Safety
 * `out_levels` must point to `len` writable values.
 */
enum LaisStatus lais_schedule_levels(const struct LaisSchedule *s, double *out_levels, size_t len);

/**
 * Runs `n` Langevin AIS chains for time `t` per level with step
 * `step_factor` times the default step. `burn_in` nonzero starts each chain
 * with a level-1 simulation of length `t` from the first well.
 *
 * # Safety
 * Handles must be live; `out_handle` must be writable.
 */
enum LaisStatus lais_ais_run(const struct LaisPotential *p,
                             const struct LaisSchedule *s,
                             double t,
                             size_t n,
                             double step_factor,
                             int32_t burn_in,
                             uint64_t seed,
                             struct LaisMeasure **out_handle);

/**
 * Autonormalized variant of [`lais_ais_run`]; the ensemble is renormalized after every level.
 *
 * # Safety
 * As [`lais_ais_run`].
 */
enum LaisStatus lais_anais_run(const struct LaisPotential *p,
                               const struct LaisSchedule *s,
                               double t,
                               size_t n,
                               double step_factor,
                               int32_t burn_in,
                               uint64_t seed,
                               struct LaisMeasure **out_handle);

/**
 * # Safety
 * `m` must come from a run function and not be used afterwards.
 */
void lais_measure_free(struct LaisMeasure *m);

/**
 * Number of atoms; 0 for NULL.
 *
 * # Safety
 * `m` must be NULL or a live handle.
 */
size_t lais_measure_len(const struct LaisMeasure *m);

/**
 * Dimension of each atom; 0 for NULL.
 *
 * # Safety
 * `m` must be NULL or a live handle.
 */
size_t lais_measure_dim(const struct LaisMeasure *m);

/**
 * Integrator steps spent producing the measure, burn-in included.
 *
 * # Safety
 * `m` must be NULL or a live handle.
 */
uint64_t lais_measure_total_steps(const struct LaisMeasure *m);

/**
 * Copies the normalized weights (`len` must equal the atom count).
 *
 * # Safety
 * `out_weights` must point to `len` writable values.
 */
enum LaisStatus lais_measure_weights(const struct LaisMeasure *m, double *out_weights, size_t len);

/**
 * Copies the atoms row-major (`len` must equal atoms times dimension).
 *
 * # Safety
 * `out_points` must point to `len` writable values.
 */
enum LaisStatus lais_measure_points(const struct LaisMeasure *m, double *out_points, size_t len);

/**
 * Effective sample size `1/Σ w_i²`.
 *
 * # Safety
 * `m` must be a live handle; `out_value` must be writable.
 */
enum LaisStatus lais_measure_ess(const struct LaisMeasure *m, double *out_value);

/**
 * Lowest `k` eigenpairs of the generator of a 1D landscape at temperature `eps`.
 *
 * # Safety
 * `p` must be a live handle; `out_handle` must be writable.
 */
enum LaisStatus lais_spectrum_new(const struct LaisPotential *p,
                                  double eps,
                                  size_t n_points,
                                  size_t k,
                                  struct LaisSpectrum **out_handle);

/**
 * # Safety
 * `s` must come from [`lais_spectrum_new`] and not be used afterwards.
 */
void lais_spectrum_free(struct LaisSpectrum *s);

/**
 * Number of computed eigenpairs; 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
size_t lais_spectrum_len(const struct LaisSpectrum *s);

/**
 * Copies the ascending eigenvalues (`len` must equal the pair count).
 *
 * # Safety
 * `out_values` must point to `len` writable values.
 */
enum LaisStatus lais_spectrum_eigenvalues(const struct LaisSpectrum *s,
                                          double *out_values,
                                          size_t len);

/**
 * Uniform mixing time from the eigen-expansion.
 *
 * # Safety
 * `s` must be a live handle; `out_value` must be writable.
 */
enum LaisStatus lais_spectrum_mixing_time(const struct LaisSpectrum *s, double *out_value);

/**
 * Runs a sampler config (the CLI's `key = value` text) and returns the CSV.
 * `algorithm` in the text selects AIS or the autonormalized sampler.
 * The string must be released with [`lais_string_free`].
 *
 * # Safety
 * `config` must be a NUL-terminated string; `out_csv` must be writable.
 */
enum LaisStatus lais_run_config(const char *config, char **out_csv);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void lais_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAIS_H */
