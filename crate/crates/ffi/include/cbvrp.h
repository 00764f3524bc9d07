#ifndef CBVRP_H
#define CBVRP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CbvrpMetric {
  CBVRP_METRIC_COSINE = 0,
  CBVRP_METRIC_NEG_SQUARED_EUCLIDEAN = 1,
} CbvrpMetric;

// Result code of every fallible call.
typedef enum CbvrpStatus {
  CBVRP_STATUS_OK = 0,
  CBVRP_STATUS_NULL_ARGUMENT = 1,
  CBVRP_STATUS_INVALID_ARGUMENT = 2,
  CBVRP_STATUS_IO = 3,
  CBVRP_STATUS_FORMAT = 4,
  CBVRP_STATUS_DIMENSION_MISMATCH = 5,
  CBVRP_STATUS_UNKNOWN_ID = 6,
  CBVRP_STATUS_PANIC = 7,
} CbvrpStatus;

typedef struct CbvrpFeatures CbvrpFeatures;

typedef struct CbvrpMatrix CbvrpMatrix;

typedef struct CbvrpModel CbvrpModel;

typedef struct CbvrpPredictions CbvrpPredictions;

typedef struct CbvrpRelevance CbvrpRelevance;

typedef struct CbvrpReport CbvrpReport;

// Training settings; start from [`cbvrp_train_config_default`].
typedef struct CbvrpTrainConfig {
  size_t embed_dim;
  double margin;
  double learning_rate;
  size_t epochs;
  size_t triplets_per_anchor;
  size_t batch_size;
  uint64_t seed;
} CbvrpTrainConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *cbvrp_version(void);

// Message of the last failed call on this thread, or NULL after a success.
// Valid until the next call into the library on the same thread.
const char *cbvrp_last_error(void);

// Empty feature set of dimension `dim`.
//
// # Safety
// `out` must be a valid pointer.
enum CbvrpStatus cbvrp_features_new(size_t dim, struct CbvrpFeatures **out);

// Appends an item with `n_frames` frames stored row-major in `values`
// (`n_frames * dim` floats).
//
// # Safety
// `set` must be a live handle, `id` a NUL-terminated string and `values`
// must point to `n_frames * dim` readable floats.
enum CbvrpStatus cbvrp_features_push(struct CbvrpFeatures *set,
                                     const char *id,
                                     const float *values,
                                     size_t n_frames);

// Loads `.cbvt` files as text and anything else as binary.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum CbvrpStatus cbvrp_features_load(const char *path, struct CbvrpFeatures **out);

// # Safety
// `set` must be a live handle and `path` a NUL-terminated string.
enum CbvrpStatus cbvrp_features_save(const struct CbvrpFeatures *set, const char *path);

// # Safety
// `set` must be NULL or a handle not yet freed.
void cbvrp_features_free(struct CbvrpFeatures *set);

// Number of items, 0 for NULL.
//
// # Safety
// `set` must be NULL or a live handle.
size_t cbvrp_features_len(const struct CbvrpFeatures *set);

// Vector dimension, 0 for NULL.
//
// # Safety
// `set` must be NULL or a live handle.
size_t cbvrp_features_dim(const struct CbvrpFeatures *set);

// Copies the pooled vector of `id` into `buf` (`buf_len` floats, at least
// the set dimension).
//
// # Safety
// `set` must be a live handle, `id` a NUL-terminated string and `buf` must
// point to `buf_len` writable floats.
enum CbvrpStatus cbvrp_features_get(const struct CbvrpFeatures *set,
                                    const char *id,
                                    float *buf,
                                    size_t buf_len);

// New set with every item's frames averaged into one vector.
//
// # Safety
// `set` must be a live handle and `out` a valid pointer.
enum CbvrpStatus cbvrp_features_mean_pool(const struct CbvrpFeatures *set,
                                          struct CbvrpFeatures **out);

// Loads a ground-truth file; `candidates` may be NULL to use every id it
// mentions.
//
// # Safety
// `path` must be a NUL-terminated string, `candidates` NULL or one, and
// `out` a valid pointer.
enum CbvrpStatus cbvrp_relevance_load(const char *path,
                                      const char *candidates,
                                      struct CbvrpRelevance **out);

// Number of queries, 0 for NULL.
//
// # Safety
// `table` must be NULL or a live handle.
size_t cbvrp_relevance_len(const struct CbvrpRelevance *table);

// # Safety
// `table` must be NULL or a handle not yet freed.
void cbvrp_relevance_free(struct CbvrpRelevance *table);

// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum CbvrpStatus cbvrp_predictions_load(const char *path, struct CbvrpPredictions **out);

// # Safety
// `table` must be a live handle and `path` a NUL-terminated string.
enum CbvrpStatus cbvrp_predictions_save(const struct CbvrpPredictions *table, const char *path);

// Number of queries, 0 for NULL.
//
// # Safety
// `table` must be NULL or a live handle.
size_t cbvrp_predictions_len(const struct CbvrpPredictions *table);

// # Safety
// `table` must be NULL or a handle not yet freed.
void cbvrp_predictions_free(struct CbvrpPredictions *table);

struct CbvrpTrainConfig cbvrp_train_config_default(void);

// Trains a linear embedding on pooled `features`; `config` may be NULL for
// the defaults.
//
// # Safety
// `truth` and `features` must be live handles, `config` NULL or valid, and
// `out` a valid pointer.
enum CbvrpStatus cbvrp_train(const struct CbvrpRelevance *truth,
                             const struct CbvrpFeatures *features,
                             const struct CbvrpTrainConfig *config,
                             struct CbvrpModel **out);

// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum CbvrpStatus cbvrp_model_load(const char *path, struct CbvrpModel **out);

// # Safety
// `model` must be a live handle and `path` a NUL-terminated string.
enum CbvrpStatus cbvrp_model_save(const struct CbvrpModel *model, const char *path);

// Writes the output and input dimensions; either pointer may be NULL.
//
// # Safety
// `model` must be a live handle; non-NULL pointers must be writable.
enum CbvrpStatus cbvrp_model_dims(const struct CbvrpModel *model,
                                  size_t *embed_dim,
                                  size_t *input_dim);

// # Safety
// `model` must be NULL or a handle not yet freed.
void cbvrp_model_free(struct CbvrpModel *model);

// Projects every pooled vector of `features` through `model`.
//
// # Safety
// `model` and `features` must be live handles and `out` a valid pointer.
enum CbvrpStatus cbvrp_embed(const struct CbvrpModel *model,
                             const struct CbvrpFeatures *features,
                             struct CbvrpFeatures **out);

// Scores every query against every candidate.
//
// # Safety
// `queries` and `candidates` must be live handles and `out` a valid pointer.
enum CbvrpStatus cbvrp_similarity(const struct CbvrpFeatures *queries,
                                  const struct CbvrpFeatures *candidates,
                                  enum CbvrpMetric metric,
                                  struct CbvrpMatrix **out);

// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum CbvrpStatus cbvrp_matrix_load(const char *path, struct CbvrpMatrix **out);

// # Safety
// `matrix` must be a live handle and `path` a NUL-terminated string.
enum CbvrpStatus cbvrp_matrix_save(const struct CbvrpMatrix *matrix, const char *path);

// Row count, 0 for NULL.
//
// # Safety
// `matrix` must be NULL or a live handle.
size_t cbvrp_matrix_rows(const struct CbvrpMatrix *matrix);

// Column count, 0 for NULL.
//
// # Safety
// `matrix` must be NULL or a live handle.
size_t cbvrp_matrix_cols(const struct CbvrpMatrix *matrix);

// Row-major scores, `rows * cols` floats owned by the handle.
//
// # Safety
// `matrix` must be NULL or a live handle; the pointer dies with it.
const float *cbvrp_matrix_scores(const struct CbvrpMatrix *matrix);

// # Safety
// `matrix` must be NULL or a handle not yet freed.
void cbvrp_matrix_free(struct CbvrpMatrix *matrix);

// Weighted average of `n` matrices over identical id registries. `weights`
// may be NULL for a plain average.
//
// # Safety
// `matrices` must point to `n` live handles, `weights` NULL or `n` readable
// doubles, and `out` a valid pointer.
enum CbvrpStatus cbvrp_fuse(const struct CbvrpMatrix *const *matrices,
                            const double *weights,
                            size_t n,
                            struct CbvrpMatrix **out);

// Top-`k` candidates per query, ties broken by ascending id.
//
// # Safety
// `matrix` must be a live handle and `out` a valid pointer.
enum CbvrpStatus cbvrp_top_k(const struct CbvrpMatrix *matrix,
                             size_t k,
                             bool exclude_self,
                             struct CbvrpPredictions **out);

// Mean hit@K and recall@K over `truth` queries with non-empty lists.
//
// # Safety
// `truth` and `pred` must be live handles, `k_hit`/`k_recall` must point to
// `n_hit`/`n_recall` values (NULL allowed when the count is 0), and `out`
// must be a valid pointer.
enum CbvrpStatus cbvrp_evaluate(const struct CbvrpRelevance *truth,
                                const struct CbvrpPredictions *pred,
                                const size_t *k_hit,
                                size_t n_hit,
                                const size_t *k_recall,
                                size_t n_recall,
                                struct CbvrpReport **out);

// Mean hit@`k`; `k` must be part of the evaluated grid.
//
// # Safety
// `report` must be a live handle and `value` a valid pointer.
enum CbvrpStatus cbvrp_report_hit(const struct CbvrpReport *report, size_t k, double *value);

// Mean recall@`k`; `k` must be part of the evaluated grid.
//
// # Safety
// `report` must be a live handle and `value` a valid pointer.
enum CbvrpStatus cbvrp_report_recall(const struct CbvrpReport *report, size_t k, double *value);

// Queries that contributed to the averages, 0 for NULL.
//
// # Safety
// `report` must be NULL or a live handle.
size_t cbvrp_report_evaluated(const struct CbvrpReport *report);

// Queries skipped for an empty ground-truth list, 0 for NULL.
//
// # Safety
// `report` must be NULL or a live handle.
size_t cbvrp_report_skipped(const struct CbvrpReport *report);

// # Safety
// `report` must be NULL or a handle not yet freed.
void cbvrp_report_free(struct CbvrpReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CBVRP_H */
