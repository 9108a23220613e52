#ifndef ASSISTRL_H
#define ASSISTRL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of a C-ABI call.
 */
typedef enum {
  ASSISTRL_STATUS_OK = 0,
  ASSISTRL_STATUS_NULL_POINTER = 1,
  ASSISTRL_STATUS_INVALID_ARGUMENT = 2,
  ASSISTRL_STATUS_DIMENSION_MISMATCH = 3,
  ASSISTRL_STATUS_CONTRACT_VIOLATION = 4,
  ASSISTRL_STATUS_RUN_FAILED = 5,
  ASSISTRL_STATUS_INTERNAL_ERROR = 6,
} AssistrlStatus;

/**
 * Opaque environment handle owning its deterministic random streams.
 */
typedef struct AssistrlEnv AssistrlEnv;

/**
 * Opaque annealing-schedule handle.
 */
typedef struct AssistrlSchedule AssistrlSchedule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *assistrl_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *assistrl_version(void);

/**
 * Creates `beta(e) = beta0 * lambda^e` (snapped to 0 below 1e-6).
 *
 * # Safety
 * `out` must be a valid pointer to a schedule-handle slot.
 */
AssistrlStatus assistrl_schedule_exponential(double beta0, double lambda, AssistrlSchedule **out);

/**
 * Creates `beta(e) = max(0, (end_episode - e) * beta0 / end_episode)`.
 *
 * # Safety
 * `out` must be a valid pointer to a schedule-handle slot.
 */
AssistrlStatus assistrl_schedule_linear(double beta0, size_t end_episode, AssistrlSchedule **out);

/**
 * Creates the target-reward-only baseline schedule (`beta(e) = 0`).
 *
 * # Safety
 * `out` must be a valid pointer to a schedule-handle slot.
 */
AssistrlStatus assistrl_schedule_constant_zero(AssistrlSchedule **out);

/**
 * Evaluates the schedule at an episode index.
 *
 * # Safety
 * `sched` must be a live handle from a schedule constructor; `out` must be
 * a valid f64 slot.
 */
AssistrlStatus assistrl_schedule_beta_at(const AssistrlSchedule *sched,
                                         size_t episode,
                                         double *out);

/**
 * Releases a schedule handle; a null pointer is a no-op.
 *
 * # Safety
 * `sched` must be null or a handle not yet freed.
 */
void assistrl_schedule_free(AssistrlSchedule *sched);

/**
 * `beta * r_assist + (1 - beta) * r_target`; `beta` must lie in [0, 1].
 *
 * # Safety
 * `out` must be a valid f64 slot.
 */
AssistrlStatus assistrl_blend(double r_target, double r_assist, double beta, double *out);

/**
 * Creates a random-walk environment sized by its total state count
 * (terminals included: 5, 11, 33, ...).
 *
 * # Safety
 * `out` must be a valid pointer to an environment-handle slot.
 */
AssistrlStatus assistrl_env_random_walk(size_t total_states, uint64_t seed, AssistrlEnv **out);

/**
 * Creates the three-source temperature-control environment.
 *
 * # Safety
 * `out` must be a valid pointer to an environment-handle slot.
 */
AssistrlStatus assistrl_env_temp_control(double omega, uint64_t seed, AssistrlEnv **out);

/**
 * Creates the four-tank environment. `coeffs` is either null (library
 * defaults) or a pointer to 10 positive model coefficients.
 *
 * # Safety
 * `coeffs` must be null or point to 10 readable f64 values; `out` must be a
 * valid pointer to an environment-handle slot.
 */
AssistrlStatus assistrl_env_four_tank(const double *coeffs,
                                      double omega,
                                      uint64_t seed,
                                      AssistrlEnv **out);

/**
 * State vector length of the environment.
 *
 * # Safety
 * `env` must be a live environment handle; `out` must be a valid slot.
 */
AssistrlStatus assistrl_env_state_dim(const AssistrlEnv *env, size_t *out);

/**
 * Action vector length of the environment (0 for the random walk).
 *
 * # Safety
 * `env` must be a live environment handle; `out` must be a valid slot.
 */
AssistrlStatus assistrl_env_action_dim(const AssistrlEnv *env, size_t *out);

/**
 * Samples an initial state into `state_out` (length `state_len ==
 * state_dim`), advancing the handle's init stream.
 *
 * # Safety
 * `env` must be a live environment handle; `state_out` must point to
 * `state_len` writable f64 values.
 */
AssistrlStatus assistrl_env_reset(AssistrlEnv *env, double *state_out, size_t state_len);

/**
 * Advances one transition, writing the successor state and both rewards.
 *
 * # Safety
 * `env` must be a live environment handle; `state` must point to
 * `state_len` readable values, `action` to `action_len` readable values
 * (`action_len == 0` with a null `action` is valid for the random walk);
 * `next_state_out` must hold `state_len` writable values and the three
 * scalar out pointers must be valid.
 */
AssistrlStatus assistrl_env_step(AssistrlEnv *env,
                                 const double *state,
                                 size_t state_len,
                                 const double *action,
                                 size_t action_len,
                                 double *next_state_out,
                                 double *r_target_out,
                                 double *r_assist_out,
                                 bool *terminated_out);

/**
 * Releases an environment handle; a null pointer is a no-op.
 *
 * # Safety
 * `env` must be null or a handle not yet freed.
 */
void assistrl_env_free(AssistrlEnv *env);

/**
 * Exact state values of the random walk under the target reward, solved
 * from the Bellman system. `values_out` must hold `total_states - 2`
 * entries (the non-terminal states).
 *
 * # Safety
 * `values_out` must point to `values_len` writable f64 values.
 */
AssistrlStatus assistrl_random_walk_true_values(size_t total_states,
                                                double *values_out,
                                                size_t values_len);

/**
 * Root-mean-square deviation between two equally sized vectors.
 *
 * # Safety
 * `a` and `b` must point to `len` readable f64 values; `out` must be valid.
 */
AssistrlStatus assistrl_rms_error(const double *a, const double *b, size_t len, double *out);

/**
 * Runs the tabular TD(0) experiment on a random walk and writes the
 * per-episode RMS curve (mean over `runs` seeded runs) into `curve_out`
 * (`curve_len == episodes`).
 *
 * # Safety
 * `sched` must be a live schedule handle; `curve_out` must point to
 * `curve_len` writable f64 values.
 */
AssistrlStatus assistrl_td_mean_rms_curve(size_t total_states,
                                          const AssistrlSchedule *sched,
                                          size_t episodes,
                                          size_t runs,
                                          double alpha,
                                          uint64_t master_seed,
                                          double *curve_out,
                                          size_t curve_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ASSISTRL_H */
