#ifndef OPTSYNTH_H
#define OPTSYNTH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OsStatus {
  OS_STATUS_OK = 0,
  OS_STATUS_NULL_POINTER = 1,
  OS_STATUS_INVALID_UTF8 = 2,
  OS_STATUS_CONFIG = 3,
  OS_STATUS_DATA = 4,
  OS_STATUS_PARSE = 5,
  OS_STATUS_IO = 6,
  OS_STATUS_SEARCH = 7,
  OS_STATUS_PANIC = 8,
} OsStatus;

typedef enum OsDsl {
  OS_DSL_NEAR = 0,
  OS_DSL_QUIVR = 1,
} OsDsl;

typedef enum OsObjective {
  OS_OBJECTIVE_ACCURACY = 0,
  OS_OBJECTIVE_F1 = 1,
} OsObjective;

typedef enum OsAlgorithm {
  OS_ALGORITHM_ASTAR = 0,
  OS_ALGORITHM_BFS = 1,
} OsAlgorithm;

typedef enum OsLowerBound {
  OS_LOWER_BOUND_MIDPOINT = 0,
  OS_LOWER_BOUND_ABSTRACT = 1,
} OsLowerBound;

typedef enum OsSplitPolicy {
  OS_SPLIT_POLICY_BISECT = 0,
  OS_SPLIT_POLICY_ISOLATE = 1,
} OsSplitPolicy;

// Opaque dataset handle.
typedef struct OsDataset OsDataset;

// Opaque result handle.
typedef struct OsResult OsResult;

// Run settings. Start from `os_config_default`.
typedef struct OsConfig {
  enum OsDsl dsl;
  enum OsObjective objective;
  enum OsAlgorithm algorithm;
  double epsilon;
  uint32_t cost_bound;
  uint32_t max_predicates;
  uint32_t max_parameters;
  // Negative means unlimited.
  double max_seconds;
  // Negative means unlimited.
  int64_t max_expansions;
  uint32_t max_split_depth;
  enum OsLowerBound lower_bound;
  enum OsSplitPolicy split_policy;
  uint32_t workers;
  // Optional root program text; may be NULL.
  const char *sketch;
} OsConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *os_last_error(void);

// Library version as a static string.
const char *os_version(void);

// Loads a JSONL dataset file.
//
// # Safety
// `path` is a valid C string and `out` a valid pointer.
enum OsStatus os_dataset_load(const char *path, enum OsDsl dsl, struct OsDataset **out);

// Parses a dataset from JSONL text.
//
// # Safety
// `text` is a valid C string and `out` a valid pointer.
enum OsStatus os_dataset_from_jsonl(const char *text, enum OsDsl dsl, struct OsDataset **out);

// Number of examples; 0 for NULL.
//
// # Safety
// `dataset` is NULL or a live handle.
size_t os_dataset_len(const struct OsDataset *dataset);

// # Safety
// `dataset` is NULL or a handle not yet freed.
void os_dataset_free(struct OsDataset *dataset);

// Defaults for `dsl`: A*, F1, epsilon 0, no budget.
struct OsConfig os_config_default(enum OsDsl dsl);

// Runs one synthesis. A run that stops on its budget still succeeds; check
// `os_result_converged`.
//
// # Safety
// `dataset` is a live handle, `config` and `out` valid pointers.
enum OsStatus os_synthesize(const struct OsDataset *dataset,
                            const struct OsConfig *config,
                            struct OsResult **out);

// # Safety
// `result` is NULL or a live handle.
bool os_result_converged(const struct OsResult *result);

// NaN for NULL.
//
// # Safety
// `result` is NULL or a live handle.
double os_result_lower(const struct OsResult *result);

// NaN for NULL.
//
// # Safety
// `result` is NULL or a live handle.
double os_result_upper(const struct OsResult *result);

// # Safety
// `result` is NULL or a live handle.
uint64_t os_result_nodes_expanded(const struct OsResult *result);

// Best program text, or NULL when none was found. Owned by the result.
//
// # Safety
// `result` is NULL or a live handle.
const char *os_result_program(const struct OsResult *result);

// The full report as JSON. Release with `os_string_free`; NULL on failure.
//
// # Safety
// `result` is NULL or a live handle.
char *os_result_json(const struct OsResult *result);

// # Safety
// `result` is NULL or a handle not yet freed.
void os_result_free(struct OsResult *result);

// # Safety
// `s` is NULL or a string returned by this library and not yet freed.
void os_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPTSYNTH_H */
