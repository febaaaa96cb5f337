#ifndef LOTFORGE_H
#define LOTFORGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  LF_STATUS_OK = 0,
  LF_STATUS_NULL_POINTER = 1,
  LF_STATUS_INVALID_ARGUMENT = 2,
  LF_STATUS_PARSE = 3,
  LF_STATUS_IO = 4,
  LF_STATUS_SIZE_GUARD = 5,
  LF_STATUS_INFEASIBLE = 6,
  LF_STATUS_INTERNAL = 7,
} LfStatus;

typedef enum {
  LF_FORMULATION_STD = 0,
  LF_FORMULATION_MC = 1,
  LF_FORMULATION_THREE_LEVEL = 2,
} LfFormulation;

/**
 * Opaque result of a heuristic run.
 */
typedef struct LfHeuristicResult LfHeuristicResult;

/**
 * Opaque problem instance.
 */
typedef struct LfInstance LfInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *lf_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *lf_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void lf_string_free(char *s);

/**
 * Parses an instance from text in the canonical format.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
LfStatus lf_instance_parse(const char *text, LfInstance **out);

/**
 * Reads an instance file.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` a valid pointer.
 */
LfStatus lf_instance_load(const char *path, LfInstance **out);

/**
 * Generates a benchmark instance.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
LfStatus lf_instance_generate(size_t retailers,
                              size_t warehouses,
                              size_t periods,
                              bool dynamic_demand,
                              bool dynamic_fixed_costs,
                              bool unbalanced,
                              uint64_t seed,
                              LfInstance **out);

/**
 * Serializes an instance; free the string with [`lf_string_free`].
 *
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer.
 */
LfStatus lf_instance_write(const LfInstance *inst, char **out);

/**
 * # Safety
 * `inst` must be a live handle. Any output pointer may be null.
 */
LfStatus lf_instance_dims(const LfInstance *inst,
                          size_t *periods,
                          size_t *warehouses,
                          size_t *retailers);

/**
 * # Safety
 * `inst` must be null or a handle not yet freed.
 */
void lf_instance_free(LfInstance *inst);

/**
 * Runs the multi-start heuristic.
 *
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer.
 */
LfStatus lf_heuristic_run(const LfInstance *inst,
                          double alpha,
                          size_t iterations,
                          uint64_t seed,
                          bool parallel,
                          LfHeuristicResult **out);

/**
 * Best cost of a run, NaN for a null handle.
 *
 * # Safety
 * `res` must be null or a live handle.
 */
double lf_heuristic_best_cost(const LfHeuristicResult *res);

/**
 * Copies up to `len` per-iteration costs into `buf` and returns the number
 * of iterations of the run. Pass a null `buf` to query the count.
 *
 * # Safety
 * `res` must be null or a live handle; `buf` must be null or hold `len` doubles.
 */
size_t lf_heuristic_iteration_costs(const LfHeuristicResult *res, double *buf, size_t len);

/**
 * Best solution as CSV; free the string with [`lf_string_free`].
 *
 * # Safety
 * `res` and `inst` must be live handles (the instance the run used) and `out` a valid pointer.
 */
LfStatus lf_heuristic_solution_csv(const LfHeuristicResult *res,
                                   const LfInstance *inst,
                                   char **out);

/**
 * # Safety
 * `res` must be null or a handle not yet freed.
 */
void lf_heuristic_free(LfHeuristicResult *res);

/**
 * Exact optimum of a tiny instance. With `restricted`, retailer shipments
 * removed by preprocessing are forbidden.
 *
 * # Safety
 * `inst` must be a live handle and `cost` a valid pointer.
 */
LfStatus lf_oracle_solve(const LfInstance *inst,
                         size_t max_setup_bits,
                         bool restricted,
                         double *cost);

/**
 * Preprocessing counts: removed variables, candidates and percentage.
 *
 * # Safety
 * `inst` must be a live handle. Any output pointer may be null.
 */
LfStatus lf_preprocess_reduction(const LfInstance *inst, size_t *np, size_t *pot, double *red);

/**
 * A formulation as LP text; free the string with [`lf_string_free`].
 *
 * # Safety
 * `inst` must be a live handle and `out` a valid pointer.
 */
LfStatus lf_export_lp(const LfInstance *inst, LfFormulation formulation, char **out);

/**
 * Single-facility uncapacitated lot-sizing over `len` periods. `produce`
 * may be null; otherwise it receives `len` production quantities.
 *
 * # Safety
 * `demand`, `setup` and `holding` must hold `len` doubles; `produce` must be
 * null or hold `len` doubles; `cost` must be a valid pointer.
 */
LfStatus lf_uls_solve(const double *demand,
                      const double *setup,
                      const double *holding,
                      size_t len,
                      double *produce,
                      double *cost);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOTFORGE_H */
