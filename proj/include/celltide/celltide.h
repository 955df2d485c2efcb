/*
 * celltide: cellular traffic forecasting (LSTM, feed-forward and ARIMA).
 *
 * C interface to the shared library. Objects are opaque handles owned by the
 * caller and released with the matching *_free function. Every fallible call
 * returns a ct_status; on failure ct_last_error() describes what went wrong.
 */
#ifndef CELLTIDE_H
#define CELLTIDE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CELLTIDE_BUILDING)
#    define CT_API __declspec(dllexport)
#  else
#    define CT_API __declspec(dllimport)
#  endif
#else
#  define CT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ct_status {
  CT_OK = 0,
  CT_ERR_INVALID_ARGUMENT = 1,
  CT_ERR_IO = 2,
  CT_ERR_PARSE = 3,
  CT_ERR_NUMERIC = 4, /* training diverged */
  CT_ERR_FIT = 5,     /* ARIMA estimation failed */
  CT_ERR_INTERNAL = 6
} ct_status;

typedef enum ct_model_kind { CT_MODEL_LSTM = 0, CT_MODEL_FFNN = 1, CT_MODEL_ARIMA = 2 } ct_model_kind;

typedef struct ct_series ct_series;
typedef struct ct_model ct_model;
typedef struct ct_history ct_history;

CT_API const char* ct_version(void);
CT_API const char* ct_status_name(ct_status status);
/* Message of the last failed call on this thread. */
CT_API const char* ct_last_error(void);

/* 1 for sms_in, sms_out, call_in, call_out or internet; 0 otherwise. */
CT_API int ct_channel_valid(const char* channel);

/* ---- series ------------------------------------------------------------ */

/* Reads every file of `dir` (tab-separated activity records) and sums the
 * chosen channel of `grid_id` into a gap-free 10-minute series. */
CT_API ct_status ct_series_ingest_dir(const char* dir, int grid_id, const char* channel, ct_series** out);
CT_API ct_status ct_series_synthetic(size_t days, uint64_t seed, ct_series** out);
CT_API ct_status ct_series_from_values(const double* values, size_t n, int64_t t0_ms, ct_series** out);
CT_API ct_status ct_series_read_csv(const char* path, ct_series** out);
/* Header slot,timestamp_ms,value; values printed with 17 significant digits. */
CT_API ct_status ct_series_write_csv(const ct_series* series, const char* path);
CT_API size_t ct_series_length(const ct_series* series);
CT_API int64_t ct_series_t0_ms(const ct_series* series);
/* Borrowed pointer, valid while `series` lives. */
CT_API const double* ct_series_values(const ct_series* series);
CT_API void ct_series_free(ct_series* series);

/* Chronological split: floor(frac·n) training slots, ceil(0.1·n) each for
 * validation and test at the end of the series. */
CT_API ct_status ct_split(size_t n_total, double train_frac, size_t* n_train, size_t* n_val, size_t* n_test);

/* ---- neural models -------------------------------------------------------- */

typedef struct ct_train_options {
  ct_model_kind kind; /* CT_MODEL_LSTM or CT_MODEL_FFNN */
  double train_frac;
  size_t window;
  size_t epochs;
  double learning_rate;
  size_t batch_size;
  uint64_t seed;
  size_t hidden; /* LSTM cells; the feed-forward model always has 5 */
} ct_train_options;

/* kind LSTM, train_frac 0.8, window 12, 20 epochs, lr 1e-3, batch 32,
 * seed 0, hidden 50. */
CT_API void ct_train_options_init(ct_train_options* options);

CT_API ct_status ct_train(const ct_series* series, const ct_train_options* options, ct_model** model,
                          ct_history** history);

CT_API size_t ct_history_length(const ct_history* history);
CT_API ct_status ct_history_get(const ct_history* history, size_t index, double* train_mae, double* val_mae,
                                double* wall_ms);
/* Header epoch,train_mae,val_mae,wall_ms. */
CT_API ct_status ct_history_write_csv(const ct_history* history, const char* path);
CT_API void ct_history_free(ct_history* history);

/* ---- ARIMA ---------------------------------------------------------------- */

typedef struct ct_arima_options {
  double train_frac;
  int auto_order; /* nonzero: AIC grid search, p and q in 0..3, d in 0..1 */
  int p;
  int d;
  int q;
} ct_arima_options;

CT_API void ct_arima_options_init(ct_arima_options* options);
/* Fits on the training slice of `series`. */
CT_API ct_status ct_arima_fit(const ct_series* series, const ct_arima_options* options, ct_model** out);
CT_API ct_status ct_model_arima_order(const ct_model* model, int* p, int* d, int* q);

/* ---- any model ------------------------------------------------------------ */

CT_API ct_model_kind ct_model_kind_of(const ct_model* model);
CT_API ct_status ct_model_save(const ct_model* model, const char* path);
CT_API ct_status ct_model_load(const char* path, ct_model** out);
/* One-step forecast on the original scale from `n` past values. */
CT_API ct_status ct_model_predict_next(const ct_model* model, const double* history, size_t n, double* out);
/* Rolling one-step forecasts over the test slice. Writes slot,truth,prediction
 * rows to `predictions_csv` unless it is NULL; either MAE pointer may be NULL. */
CT_API ct_status ct_model_evaluate(const ct_model* model, const ct_series* series, double train_frac,
                                   const char* predictions_csv, double* test_mae, double* test_mae_normalized);
CT_API void ct_model_free(ct_model* model);

/* ---- full comparison ------------------------------------------------------ */

/* Trains LSTM and FFNN with `options` (kind ignored), fits an auto-order
 * ARIMA, and writes lstm_history.csv, ffnn_history.csv, lstm_predictions.csv,
 * ffnn_predictions.csv, arima_predictions.csv and report.json into out_dir.
 * Nothing is left behind on failure. */
CT_API ct_status ct_compare(const ct_series* series, const ct_train_options* options, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* CELLTIDE_H */
