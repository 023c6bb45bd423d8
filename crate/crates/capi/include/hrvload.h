#ifndef HRVLOAD_H
#define HRVLOAD_H

/* Generated by cbindgen from hrvload-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Histogram bin width in milliseconds conventionally used by the HRV
 * triangular index (1/128 s sampling).
 */
#define HL_DEFAULT_BIN_WIDTH_MS 7.8125

/**
 * Result code of every fallible call.
 */
typedef enum HlStatus {
  HL_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  HL_STATUS_NULL_ARGUMENT = 1,
  /**
   * The input values violate a documented bound.
   */
  HL_STATUS_INVALID_INPUT = 2,
  /**
   * A file exists but its contents are malformed.
   */
  HL_STATUS_PARSE_ERROR = 3,
  /**
   * A document has the wrong columns or shape.
   */
  HL_STATUS_SCHEMA_MISMATCH = 4,
  HL_STATUS_IO_ERROR = 5,
  /**
   * A model document is unreadable or has the wrong format version.
   */
  HL_STATUS_MODEL_ERROR = 6,
  /**
   * The library itself failed; report this as a bug.
   */
  HL_STATUS_INTERNAL_ERROR = 7,
} HlStatus;

/**
 * A trained classifier together with the feature scaler it was trained
 * behind. Create with [`hl_model_load`], release with [`hl_model_free`].
 */
typedef struct HlModel HlModel;

/**
 * An RR-interval recording. Create with [`hl_rr_from_intervals`] or
 * [`hl_rr_load`], release with [`hl_rr_free`].
 */
typedef struct HlRrSeries HlRrSeries;

/**
 * The nine features of one RR recording.
 */
typedef struct HlHrvFeatures {
  /**
   * Mean interval, ms.
   */
  double avnn;
  /**
   * Population standard deviation of the intervals, ms.
   */
  double sdnn;
  /**
   * Root mean square of successive differences, ms.
   */
  double rmssd;
  /**
   * Population standard deviation of successive differences, ms.
   */
  double sdsd;
  /**
   * Successive differences larger than 50 ms in magnitude.
   */
  uint32_t nn50;
  /**
   * NN50 as a fraction of the interval count.
   */
  double pnn50;
  /**
   * Interval count over the modal histogram bin count.
   */
  double hrv_index;
  /**
   * Mean instantaneous heart rate, beats/min.
   */
  double rahr;
  /**
   * Peak instantaneous heart rate, beats/min.
   */
  double rmhr;
} HlHrvFeatures;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, NUL-terminated and
 * empty when nothing failed yet. The pointer stays valid until the next
 * failing `hl_*` call on the same thread.
 */
const char *hl_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hl_version(void);

/**
 * Builds an RR series from `len` intervals in milliseconds. Intervals
 * must be finite and inside (0, 3000) ms. Returns NULL on failure.
 */
struct HlRrSeries *hl_rr_from_intervals(const double *intervals, size_t len);

/**
 * Reads an RR recording file: one interval in milliseconds per line,
 * optionally headed by `rr_ms`. Returns NULL on failure.
 */
struct HlRrSeries *hl_rr_load(const char *path);

/**
 * Number of intervals in the series; 0 when `series` is NULL.
 */
size_t hl_rr_len(const struct HlRrSeries *series);

/**
 * Releases a series. NULL is a no-op.
 */
void hl_rr_free(struct HlRrSeries *series);

/**
 * Extracts the nine HRV features into `*out`. Pass
 * [`HL_DEFAULT_BIN_WIDTH_MS`] as the histogram bin width unless another
 * width is required; the series needs at least 3 intervals.
 */
enum HlStatus hl_hrv_compute(const struct HlRrSeries *series,
                             double bin_width_ms,
                             struct HlHrvFeatures *out);

/**
 * Loads a trained model and its scaler from the JSON documents written
 * by `hrvload train`. Returns NULL on failure.
 */
struct HlModel *hl_model_load(const char *model_path, const char *scaler_path);

/**
 * Releases a model. NULL is a no-op.
 */
void hl_model_free(struct HlModel *model);

/**
 * Number of input features the model expects; 0 when `model` is NULL.
 */
size_t hl_model_n_features(const struct HlModel *model);

/**
 * Number of load classes (the probability row width). Always 3: low,
 * medium, high.
 */
size_t hl_model_n_classes(const struct HlModel *model);

/**
 * Name of input feature `index`, matching the training column order.
 * The pointer stays valid while the model lives; NULL when out of range.
 */
const char *hl_model_feature_name(const struct HlModel *model, size_t index);

/**
 * Static name of class `index`: "low", "medium", "high". NULL when out
 * of range.
 */
const char *hl_class_name(size_t index);

/**
 * Predicts the load class of one raw (unscaled) feature row laid out in
 * the model's column order; writes the class index (0 low, 1 medium,
 * 2 high) to `*class_index`.
 */
enum HlStatus hl_model_predict(const struct HlModel *model,
                               const double *features,
                               size_t len,
                               size_t *class_index);

/**
 * Class probabilities of one raw feature row; fills `proba` (length
 * [`hl_model_n_classes`]) indexed 0 low, 1 medium, 2 high.
 */
enum HlStatus hl_model_predict_proba(const struct HlModel *model,
                                     const double *features,
                                     size_t len,
                                     double *proba);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HRVLOAD_H */
