#ifndef CONSENSUS_HPO_H
#define CONSENSUS_HPO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  CHPO_STATUS_OK = 0,
  CHPO_STATUS_NULL_POINTER = 1,
  CHPO_STATUS_INVALID_ARGUMENT = 2,
  CHPO_STATUS_IO = 3,
  CHPO_STATUS_DEGENERATE = 4,
  CHPO_STATUS_UNDEFINED = 5,
  CHPO_STATUS_INTERNAL = 6,
  CHPO_STATUS_PANIC = 7,
} ChpoStatus;

typedef enum {
  CHPO_LINKAGE_SINGLE = 0,
  CHPO_LINKAGE_AVERAGE = 1,
  CHPO_LINKAGE_COMPLETE = 2,
} ChpoLinkage;

typedef struct ChpoDataset ChpoDataset;

typedef struct ChpoEnsemble ChpoEnsemble;

typedef struct ChpoGrid ChpoGrid;

typedef struct ChpoLabeling ChpoLabeling;

typedef struct ChpoSelection ChpoSelection;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *chpo_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void chpo_string_free(char *s);

/**
 * Releases the handle; null is ignored.
 *
 * # Safety
 * The handle must come from this library and not be freed twice.
 */
void chpo_dataset_free(ChpoDataset *handle);

/**
 * Releases the handle; null is ignored.
 *
 * # Safety
 * The handle must come from this library and not be freed twice.
 */
void chpo_labeling_free(ChpoLabeling *handle);

/**
 * Releases the handle; null is ignored.
 *
 * # Safety
 * The handle must come from this library and not be freed twice.
 */
void chpo_grid_free(ChpoGrid *handle);

/**
 * Releases the handle; null is ignored.
 *
 * # Safety
 * The handle must come from this library and not be freed twice.
 */
void chpo_ensemble_free(ChpoEnsemble *handle);

/**
 * Releases the handle; null is ignored.
 *
 * # Safety
 * The handle must come from this library and not be freed twice.
 */
void chpo_selection_free(ChpoSelection *handle);

/**
 * Dataset from `n * d` row-major coordinates.
 *
 * # Safety
 * `points` must be readable for `n * d` doubles.
 */
ChpoStatus chpo_dataset_new(const double *points, size_t n, size_t d, ChpoDataset **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string.
 */
ChpoStatus chpo_dataset_load_csv(const char *path, bool has_header, ChpoDataset **out);

/**
 * Point count, or 0 for a null handle.
 *
 * # Safety
 * `ds` must be null or a live dataset handle.
 */
size_t chpo_dataset_n(const ChpoDataset *ds);

/**
 * Dimension, or 0 for a null handle.
 *
 * # Safety
 * `ds` must be null or a live dataset handle.
 */
size_t chpo_dataset_d(const ChpoDataset *ds);

/**
 * # Safety
 * `labels` must be readable for `n` values.
 */
ChpoStatus chpo_labeling_new(const uint32_t *labels, size_t n, ChpoLabeling **out);

/**
 * Point count, or 0 for a null handle.
 *
 * # Safety
 * `l` must be null or a live labeling handle.
 */
size_t chpo_labeling_len(const ChpoLabeling *l);

/**
 * Number of distinct labels, or 0 for a null handle.
 *
 * # Safety
 * `l` must be null or a live labeling handle.
 */
size_t chpo_labeling_clusters(const ChpoLabeling *l);

/**
 * Copies the canonical labels (first appearance order, from 0) into
 * `buf`, which must hold at least `chpo_labeling_len` values.
 *
 * # Safety
 * `buf` must be writable for `cap` values.
 */
ChpoStatus chpo_labeling_copy(const ChpoLabeling *l, uint32_t *buf, size_t cap);

/**
 * # Safety
 * All pointers must be live handles or valid out-pointers.
 */
ChpoStatus chpo_nmi(const ChpoLabeling *a, const ChpoLabeling *b, double *out);

/**
 * Returns `Undefined` when the index is 0/0 for non-identical partitions.
 *
 * # Safety
 * All pointers must be live handles or valid out-pointers.
 */
ChpoStatus chpo_ari(const ChpoLabeling *a, const ChpoLabeling *b, double *out);

/**
 * Runs one configuration given as JSON, e.g.
 * `{"algorithm": "dbscan", "eps": 0.5, "min_points": 3}`.
 *
 * # Safety
 * `params_json` must be NUL-terminated; other pointers live or valid.
 */
ChpoStatus chpo_cluster(const ChpoDataset *ds, const char *params_json, ChpoLabeling **out);

/**
 * Grid from a JSON spec: a list of parameter blocks or a full experiment
 * spec object.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` a valid out-pointer.
 */
ChpoStatus chpo_grid_from_json(const char *json, ChpoGrid **out);

/**
 * # Safety
 * `grid` must be null or a live grid handle.
 */
size_t chpo_grid_len(const ChpoGrid *grid);

/**
 * # Safety
 * All pointers must be live handles or valid out-pointers.
 */
ChpoStatus chpo_ensemble_build(const ChpoDataset *ds, const ChpoGrid *grid, ChpoEnsemble **out);

/**
 * Member count, or 0 for a null handle.
 *
 * # Safety
 * `ens` must be null or a live ensemble handle.
 */
size_t chpo_ensemble_len(const ChpoEnsemble *ens);

/**
 * Copy of member `index` as a new labeling handle.
 *
 * # Safety
 * All pointers must be live handles or valid out-pointers.
 */
ChpoStatus chpo_ensemble_member(const ChpoEnsemble *ens, size_t index, ChpoLabeling **out);

/**
 * `linkage` is a `ChpoLinkage` value.
 *
 * # Safety
 * All pointers must be live handles or valid out-pointers.
 */
ChpoStatus chpo_consensus(const ChpoEnsemble *ens,
                          size_t k_star,
                          uint32_t linkage,
                          ChpoLabeling **out);

/**
 * # Safety
 * All pointers must be live handles or valid out-pointers.
 */
ChpoStatus chpo_select_anmi(const ChpoEnsemble *ens, ChpoSelection **out);

/**
 * `linkage` is a `ChpoLinkage` value.
 *
 * # Safety
 * All pointers must be live handles or valid out-pointers.
 */
ChpoStatus chpo_select_best_match(const ChpoEnsemble *ens,
                                  size_t k_star,
                                  uint32_t linkage,
                                  ChpoSelection **out);

/**
 * Grid index of the chosen configuration.
 *
 * # Safety
 * All pointers must be live handles or valid out-pointers.
 */
ChpoStatus chpo_selection_index(const ChpoSelection *sel, size_t *out);

/**
 * # Safety
 * All pointers must be live handles or valid out-pointers.
 */
ChpoStatus chpo_selection_score(const ChpoSelection *sel, double *out);

/**
 * Display name of the chosen configuration; release with
 * [`chpo_string_free`].
 *
 * # Safety
 * All pointers must be live handles or valid out-pointers.
 */
ChpoStatus chpo_selection_config(const ChpoSelection *sel, char **out);

/**
 * Full selection result as JSON; release with [`chpo_string_free`].
 *
 * # Safety
 * All pointers must be live handles or valid out-pointers.
 */
ChpoStatus chpo_selection_to_json(const ChpoSelection *sel, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONSENSUS_HPO_H */
