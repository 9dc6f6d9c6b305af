#ifndef DNLS_H
#define DNLS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared by every entry point.
 */
typedef enum DnlsStatus {
  DNLS_STATUS_OK = 0,
  /**
   * The check ran and its verdict is FAIL; outputs are still written.
   */
  DNLS_STATUS_CHECK_FAILED = 1,
  /**
   * Malformed JSON, bad parameters or an unmet precondition.
   */
  DNLS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Step-size underflow or a non-convergent iteration.
   */
  DNLS_STATUS_NUMERICAL = 3,
  DNLS_STATUS_NULL_POINTER = 4,
  /**
   * An internal panic was caught.
   */
  DNLS_STATUS_PANIC = 5,
  /**
   * The caller's buffer is too short.
   */
  DNLS_STATUS_BUFFER_TOO_SMALL = 6,
} DnlsStatus;

/**
 * A periodic breather found by the fixed-point solver.
 */
typedef struct DnlsBreather DnlsBreather;

/**
 * A validated scenario configuration.
 */
typedef struct DnlsScenario DnlsScenario;

/**
 * Sampled trajectory: times and lattice states.
 */
typedef struct DnlsTrajectory DnlsTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *dnls_last_error_message(void);

/**
 * Parses and validates a scenario JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum DnlsStatus dnls_scenario_from_json(const char *json, struct DnlsScenario **out);

/**
 * Overrides the scenario seed.
 *
 * # Safety
 * `scenario` must come from [`dnls_scenario_from_json`].
 */
enum DnlsStatus dnls_scenario_set_seed(struct DnlsScenario *scenario, uint64_t seed);

/**
 * Number of lattice sites.
 *
 * # Safety
 * `scenario` must come from [`dnls_scenario_from_json`]; `out` must be writable.
 */
enum DnlsStatus dnls_scenario_sites(const struct DnlsScenario *scenario, size_t *out);

/**
 * # Safety
 * `scenario` must come from [`dnls_scenario_from_json`] or be null, and must
 * not be used afterwards.
 */
void dnls_scenario_free(struct DnlsScenario *scenario);

/**
 * Integrates the configured initial state over `[t0, t0 + horizon]`.
 *
 * # Safety
 * `scenario` must come from [`dnls_scenario_from_json`]; `out` must be writable.
 */
enum DnlsStatus dnls_simulate(const struct DnlsScenario *scenario, struct DnlsTrajectory **out);

/**
 * Number of samples and lattice sites.
 *
 * # Safety
 * `traj` must come from [`dnls_simulate`]; the outputs must be writable.
 */
enum DnlsStatus dnls_trajectory_shape(const struct DnlsTrajectory *traj,
                                      size_t *samples,
                                      size_t *sites);

/**
 * Copies the sample times into `buf`, which must hold `samples` doubles.
 *
 * # Safety
 * `traj` must come from [`dnls_simulate`]; `buf` must point to `len` doubles.
 */
enum DnlsStatus dnls_trajectory_times(const struct DnlsTrajectory *traj, double *buf, size_t len);

/**
 * Copies sample `index` as interleaved `re, im` pairs into `buf`, which must
 * hold `2 * sites` doubles.
 *
 * # Safety
 * `traj` must come from [`dnls_simulate`]; `buf` must point to `len` doubles.
 */
enum DnlsStatus dnls_trajectory_state(const struct DnlsTrajectory *traj,
                                      size_t index,
                                      double *buf,
                                      size_t len);

/**
 * # Safety
 * `traj` must come from [`dnls_simulate`] or be null, and must not be used
 * afterwards.
 */
void dnls_trajectory_free(struct DnlsTrajectory *traj);

/**
 * Solves for the periodic breather from the zero state, or from a random
 * state in the absorbing ball when `use_seed` is true.
 *
 * # Safety
 * `scenario` must come from [`dnls_scenario_from_json`]; `out` must be writable.
 */
enum DnlsStatus dnls_find_breather(const struct DnlsScenario *scenario,
                                   bool use_seed,
                                   uint64_t seed,
                                   struct DnlsBreather **out);

/**
 * Lattice state at `t0` as interleaved `re, im` pairs; `buf` must hold
 * `2 * sites` doubles.
 *
 * # Safety
 * `breather` must come from [`dnls_find_breather`]; `buf` must point to `len` doubles.
 */
enum DnlsStatus dnls_breather_state(const struct DnlsBreather *breather, double *buf, size_t len);

/**
 * Period, periodicity residual and iteration count.
 *
 * # Safety
 * `breather` must come from [`dnls_find_breather`]; the outputs must be writable.
 */
enum DnlsStatus dnls_breather_info(const struct DnlsBreather *breather,
                                   double *period,
                                   double *residual,
                                   size_t *iterations);

/**
 * # Safety
 * `breather` must come from [`dnls_find_breather`] or be null, and must not
 * be used afterwards.
 */
void dnls_breather_free(struct DnlsBreather *breather);

/**
 * Runs a named check (`simulate`, `verify-bounds`, `absorbing`, `tail`,
 * `contraction`, `continuity`, `dimension`, `breather`) and writes its JSON
 * summary to `out_json`, to be released with [`dnls_string_free`]. Returns
 * `DNLS_STATUS_CHECK_FAILED` with the summary written when the verdict is FAIL.
 *
 * # Safety
 * `scenario` must come from [`dnls_scenario_from_json`], `command` must be a
 * NUL-terminated string and `out_json` writable.
 */
enum DnlsStatus dnls_run_check(const struct DnlsScenario *scenario,
                               const char *command,
                               char **out_json);

/**
 * # Safety
 * `s` must come from this library or be null, and must not be used afterwards.
 */
void dnls_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DNLS_H */
