#ifndef SUBMAX_H
#define SUBMAX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SubmaxStatus {
  SUBMAX_STATUS_OK = 0,
  SUBMAX_STATUS_NULL_POINTER = 1,
  SUBMAX_STATUS_INVALID_ARGUMENT = 2,
  SUBMAX_STATUS_INVALID_INSTANCE = 3,
  SUBMAX_STATUS_PARSE = 4,
  SUBMAX_STATUS_IO = 5,
  SUBMAX_STATUS_DEGENERATE = 6,
  SUBMAX_STATUS_SIZE_LIMIT = 7,
  SUBMAX_STATUS_PANIC = 8,
} SubmaxStatus;

typedef enum SubmaxAlgorithm {
  SUBMAX_ALGORITHM_ADAPTIVE = 0,
  SUBMAX_ALGORITHM_GREEDY = 1,
  SUBMAX_ALGORITHM_LAZY = 2,
  SUBMAX_ALGORITHM_THRESHOLD = 3,
} SubmaxAlgorithm;

typedef struct SubmaxInstance SubmaxInstance;

typedef struct SubmaxResult SubmaxResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *submax_last_error(void);

/**
 * Loads an instance file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SubmaxStatus submax_instance_load(const char *path, struct SubmaxInstance **out);

/**
 * Random coverage instance.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SubmaxStatus submax_instance_gen_coverage(size_t n_sets,
                                               size_t n_universe,
                                               double density,
                                               double weight_max,
                                               uint64_t seed,
                                               struct SubmaxInstance **out);

/**
 * Random facility location instance.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SubmaxStatus submax_instance_gen_facility(size_t n_items,
                                               size_t n_clients,
                                               uint64_t seed,
                                               struct SubmaxInstance **out);

/**
 * Number of ground elements, or 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t submax_instance_size(const struct SubmaxInstance *inst);

/**
 * `f(S)` for the `len` element indices at `elements`.
 *
 * # Safety
 * `inst` must be a live handle, `elements` must point to `len` values (or
 * be null with `len == 0`) and `out` must be valid.
 */
enum SubmaxStatus submax_instance_value(const struct SubmaxInstance *inst,
                                        const size_t *elements,
                                        size_t len,
                                        double *out);

/**
 * # Safety
 * `inst` must be null or a handle not yet freed.
 */
void submax_instance_free(struct SubmaxInstance *inst);

/**
 * Maximizes `f(S)` subject to `|S| ≤ k`. `eps` and `theory_mode` apply to
 * the adaptive algorithm; `eps` also sets the threshold schedule. `seed`
 * drives all randomness.
 *
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer.
 */
enum SubmaxStatus submax_solve(const struct SubmaxInstance *inst,
                               enum SubmaxAlgorithm algorithm,
                               size_t k,
                               double eps,
                               bool theory_mode,
                               uint64_t seed,
                               struct SubmaxResult **out);

/**
 * # Safety
 * `res` must be null or a live result handle.
 */
double submax_result_value(const struct SubmaxResult *res);

/**
 * # Safety
 * `res` must be null or a live result handle.
 */
uint64_t submax_result_queries(const struct SubmaxResult *res);

/**
 * # Safety
 * `res` must be null or a live result handle.
 */
uint64_t submax_result_rounds(const struct SubmaxResult *res);

/**
 * # Safety
 * `res` must be null or a live result handle.
 */
bool submax_result_failed(const struct SubmaxResult *res);

/**
 * # Safety
 * `res` must be null or a live result handle.
 */
size_t submax_result_len(const struct SubmaxResult *res);

/**
 * Copies up to `capacity` selected elements (ascending) into `buf` and
 * returns how many were written.
 *
 * # Safety
 * `res` must be a live handle and `buf` must have room for `capacity` values.
 */
size_t submax_result_elements(const struct SubmaxResult *res, size_t *buf, size_t capacity);

/**
 * # Safety
 * `res` must be null or a handle not yet freed.
 */
void submax_result_free(struct SubmaxResult *res);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUBMAX_H */
