/* C interface to the badapprox construction kernels. */

#ifndef BADAPPROX_H
#define BADAPPROX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum BaStatus {
  BaOk = 0,
  /**
   * A pointer argument was NULL or a string was not valid UTF-8.
   */
  BaErrArgument = 1,
  /**
   * Construction parameters failed validation.
   */
  BaErrInvalidParams = 2,
  /**
   * A sweep or comparison exceeded its work budget.
   */
  BaErrBudget = 3,
  /**
   * The provided output buffer is too small.
   */
  BaErrBuffer = 4,
  /**
   * Any other failure; see `ba_last_error_message`.
   */
  BaErrInternal = 5,
} BaStatus;

/**
 * Opaque handle to a lazily resolved pruning state.
 */
typedef struct BaState BaState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread (valid until the next failure).
 */
const char *ba_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *ba_version(void);

/**
 * Create a pruning state. On success `*out` owns the handle; release it
 * with `ba_state_free`.
 */
enum BaStatus ba_state_new(uint32_t d,
                           uint32_t tau_num,
                           uint32_t tau_den,
                           uint32_t m,
                           uint32_t t,
                           uint32_t u,
                           uint32_t max_stage,
                           struct BaState **out);

/**
 * Release a state handle. NULL is a no-op.
 */
void ba_state_free(struct BaState *state);

/**
 * Grid level pruned at the given stage.
 */
enum BaStatus ba_prune_level(const struct BaState *state, uint32_t stage, uint32_t *out);

/**
 * Whether the level-`l(stage)` cube at `index` ("i1,...,id" in decimal)
 * survives the given pruning stage. `*out` becomes 1 or 0.
 */
enum BaStatus ba_cube_survives(const struct BaState *state,
                               uint32_t stage,
                               const char *index,
                               int32_t *out);

/**
 * Certified lower bound on the measure surviving the given stage, written
 * as `"num/den"`.
 */
enum BaStatus ba_measure_lower_bound(const struct BaState *state,
                                     uint32_t stage,
                                     char *buf,
                                     uintptr_t buf_len);

/**
 * Exhaustive dangerous-ball avoidance check over denominators up to
 * `q_cap`; `*violations` receives the number of rationals whose dangerous
 * ball still meets the surviving union.
 */
enum BaStatus ba_avoidance_violations(const struct BaState *state,
                                      uint32_t stage,
                                      uint64_t q_cap,
                                      uint64_t *violations);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* BADAPPROX_H */
