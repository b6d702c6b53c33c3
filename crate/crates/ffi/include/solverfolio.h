#ifndef SOLVERFOLIO_H
#define SOLVERFOLIO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every call.
 */
typedef enum SfStatus {
  SF_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  SF_STATUS_NULL_ARGUMENT = 1,
  /*
   A string argument was not valid UTF-8.
   */
  SF_STATUS_INVALID_UTF8 = 2,
  /*
   Bad input data or arguments.
   */
  SF_STATUS_VALIDATION = 3,
  SF_STATUS_IO = 4,
  SF_STATUS_INTERNAL = 5,
  /*
   The library panicked; the handle involved should not be reused.
   */
  SF_STATUS_PANIC = 6,
} SfStatus;

typedef enum SfShapleyMode {
  SF_SHAPLEY_MODE_EXACT_WEIGHTED = 0,
  SF_SHAPLEY_MODE_UNWEIGHTED_SUM = 1,
  SF_SHAPLEY_MODE_SAMPLED = 2,
} SfShapleyMode;

/*
 Opaque handle to an ingested dataset.
 */
typedef struct SfDataset SfDataset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *sf_version(void);

/*
 Message describing the last failure on this thread, or null. The pointer
 stays valid until the next library call on the same thread.
 */
const char *sf_last_error_message(void);

/*
 Parses canonical CSV text into a new dataset.

 # Safety
 `csv` must be a NUL-terminated string; `out` must be writable.
 */
enum SfStatus sf_dataset_from_csv(const char *csv, struct SfDataset **out);

/*
 Reads a canonical CSV file into a new dataset.

 # Safety
 `path` must be a NUL-terminated string; `out` must be writable.
 */
enum SfStatus sf_dataset_open(const char *path, struct SfDataset **out);

/*
 Releases a dataset. Null is ignored.

 # Safety
 `ds` must come from this library and not be used afterwards.
 */
void sf_dataset_free(struct SfDataset *ds);

/*
 # Safety
 `ds` must be a live handle; `out` must be writable.
 */
enum SfStatus sf_dataset_solver_count(const struct SfDataset *ds, size_t *out);

/*
 # Safety
 `ds` must be a live handle; `out` must be writable.
 */
enum SfStatus sf_dataset_instance_count(const struct SfDataset *ds, size_t *out);

/*
 Id of the solver at `index` in sorted order; free with [`sf_string_free`].

 # Safety
 `ds` must be a live handle; `out` must be writable.
 */
enum SfStatus sf_dataset_solver_id(const struct SfDataset *ds, size_t index, char **out);

/*
 Performance ratio of `portfolio` against `baseline` as a double.

 # Safety
 `ds` must be a live handle; string arguments NUL-terminated or null;
 `out` must be writable.
 */
enum SfStatus sf_perf(const struct SfDataset *ds,
                      const char *portfolio,
                      const char *baseline,
                      double *out);

/*
 Performance ratio as an exact `p/q` string; free with [`sf_string_free`].

 # Safety
 As for [`sf_perf`].
 */
enum SfStatus sf_perf_exact(const struct SfDataset *ds,
                            const char *portfolio,
                            const char *baseline,
                            char **out);

/*
 Borda ranking over `solvers` as a JSON array.

 # Safety
 `ds` must be a live handle; `solvers` NUL-terminated or null; `out`
 must be writable.
 */
enum SfStatus sf_borda_json(const struct SfDataset *ds, const char *solvers, char **out);

/*
 Minimum portfolios over `solvers` as JSON with `coverage` and `solution`.

 # Safety
 As for [`sf_borda_json`].
 */
enum SfStatus sf_min_cover_json(const struct SfDataset *ds,
                                const char *solvers,
                                uint64_t epsilon_ms,
                                size_t cap,
                                char **out);

/*
 Best subset of `space` for every size, measured against `baseline`.

 # Safety
 As for [`sf_perf`], with a string out-parameter.
 */
enum SfStatus sf_tradeoff_json(const struct SfDataset *ds,
                               const char *space,
                               const char *baseline,
                               char **out);

/*
 Shapley values of `portfolio` members against `baseline`. `samples` and
 `seed` are used only in sampled mode.

 # Safety
 As for [`sf_perf`], with a string out-parameter.
 */
enum SfStatus sf_shapley_json(const struct SfDataset *ds,
                              const char *portfolio,
                              const char *baseline,
                              enum SfShapleyMode mode,
                              uint64_t samples,
                              uint64_t seed,
                              char **out);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void sf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOLVERFOLIO_H */
