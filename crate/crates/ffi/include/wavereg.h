#ifndef WAVEREG_H
#define WAVEREG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes. The non-zero error values match the CLI exit codes.
typedef enum WrStatus {
  WR_STATUS_OK = 0,
  // A required pointer was null or a string was not UTF-8.
  WR_STATUS_INVALID_ARGUMENT = 1,
  // Unknown filter, unreadable file, bad option.
  WR_STATUS_CONFIG = 2,
  // Shape, range, dimensionality or file-format problem.
  WR_STATUS_DATA = 3,
  // Non-finite values or a degenerate decomposition.
  WR_STATUS_NUMERIC = 4,
  // Internal panic; the handle arguments are left untouched.
  WR_STATUS_INTERNAL = 5,
} WrStatus;

// Opaque fitted model.
typedef struct WrModel WrModel;

// Optional fit settings. Start from [`wr_fit_options_default`].
typedef struct WrFitOptions {
  // Filter name (`haar`, `db4tap`, `coif24tap`); null selects `coif24tap`.
  const char *filter;
  // Resolution level; negative selects it from the sample size.
  int32_t level;
  // Truncation threshold; zero or negative selects it from the data.
  double beta;
  // Ridge penalty; negative means minimum-norm least squares.
  double ridge_lambda;
  // Quantile-box coverage in (0, 1]; zero or negative disables it.
  double quantile_coverage;
} WrFitOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Defaults: automatic level and threshold, plain least squares, all rows.
struct WrFitOptions wr_fit_options_default(void);

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next call into this library on the same thread.
const char *wr_last_error(void);

// Fits a model to `x` (`n × p`, row-major) and `y` (`n`).
//
// # Safety
// `x` must point to `n * p` doubles, `y` to `n` doubles, `out` to a
// writable handle slot. `options` may be null.
enum WrStatus wr_fit(const double *x,
                     size_t n,
                     size_t p,
                     const double *y,
                     const struct WrFitOptions *options,
                     struct WrModel **out);

// Predicts `n` rows of `x` (`n × p`, row-major) into `out`. Rows outside
// the training range are clipped; their count goes to `clipped` if it is
// not null.
//
// # Safety
// `model` must be a live handle, `x` must point to `n * p` doubles and
// `out` to room for `n` doubles.
enum WrStatus wr_predict(const struct WrModel *model,
                         const double *x,
                         size_t n,
                         size_t p,
                         double *out,
                         size_t *clipped);

// Centered component `j` (zero based) at raw value `x`, standardized scale.
//
// # Safety
// `model` must be a live handle and `out` writable.
enum WrStatus wr_model_component(const struct WrModel *model, size_t j, double x, double *out);

// Writes the model file.
//
// # Safety
// `model` must be a live handle and `path` a NUL-terminated string.
enum WrStatus wr_model_save(const struct WrModel *model, const char *path);

// Reads a model file into a new handle.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a writable handle slot.
enum WrStatus wr_model_load(const char *path, struct WrModel **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `model` must be null or a handle not yet freed.
void wr_model_free(struct WrModel *model);

// Number of predictors, or 0 for a null handle.
//
// # Safety
// `model` must be null or a live handle.
size_t wr_model_predictors(const struct WrModel *model);

// Resolution level, or -1 for a null handle.
//
// # Safety
// `model` must be null or a live handle.
int32_t wr_model_level(const struct WrModel *model);

// Truncation threshold on the standardized scale, NaN for a null handle.
//
// # Safety
// `model` must be null or a live handle.
double wr_model_beta(const struct WrModel *model);

// Noise estimate on the standardized scale, NaN for a null handle.
//
// # Safety
// `model` must be null or a live handle.
double wr_model_sigma_hat(const struct WrModel *model);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WAVEREG_H */
