#include "celltide/celltide.h"

#include <fstream>
#include <new>
#include <sstream>
#include <string>
#include <variant>

#include "celltide/cdr.hpp"
#include "celltide/error.hpp"
#include "celltide/format.hpp"
#include "celltide/pipeline.hpp"

using namespace celltide;

struct ct_series {
  cdr::ActivitySeries series;
};

struct ct_model {
  std::variant<pipeline::TrainedNetwork, arima::ArimaModel> model;
};

struct ct_history {
  train::History history;
};

namespace {

thread_local std::string g_last_error;

ct_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return CT_ERR_INVALID_ARGUMENT;
    case ErrorCode::Io: return CT_ERR_IO;
    case ErrorCode::Parse: return CT_ERR_PARSE;
    case ErrorCode::Numeric: return CT_ERR_NUMERIC;
    case ErrorCode::Fit: return CT_ERR_FIT;
  }
  return CT_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into a status and last-error message.
template <typename F>
ct_status guarded(F&& body) {
  try {
    body();
    return CT_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return CT_ERR_INTERNAL;
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorCode::InvalidArgument, what);
}

cdr::Channel channel_from(const char* name) {
  require(name != nullptr, "channel is null");
  const auto channel = cdr::parse_channel(name);
  if (!channel) fail(ErrorCode::InvalidArgument, std::string("unknown channel '") + name + "'");
  return *channel;
}

pipeline::NetworkOptions network_options(const ct_train_options& o) {
  require(o.kind == CT_MODEL_LSTM || o.kind == CT_MODEL_FFNN, "train options: kind must be LSTM or FFNN");
  pipeline::NetworkOptions n;
  n.kind = o.kind == CT_MODEL_LSTM ? pipeline::ModelKind::Lstm : pipeline::ModelKind::Ffnn;
  n.train_frac = o.train_frac;
  n.hidden = o.hidden;
  n.train = {o.epochs, o.learning_rate, o.batch_size, o.seed, o.window};
  return n;
}

std::span<const double> values_of(const ct_series* s) {
  require(s != nullptr, "series is null");
  return s->series.values;
}

}  // namespace

extern "C" {

const char* ct_version(void) { return "0.1.0"; }

const char* ct_status_name(ct_status status) {
  switch (status) {
    case CT_OK: return "ok";
    case CT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CT_ERR_IO: return "i/o error";
    case CT_ERR_PARSE: return "parse error";
    case CT_ERR_NUMERIC: return "numeric error";
    case CT_ERR_FIT: return "fit error";
    case CT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* ct_last_error(void) { return g_last_error.c_str(); }

int ct_channel_valid(const char* channel) { return channel && cdr::parse_channel(channel) ? 1 : 0; }

ct_status ct_series_ingest_dir(const char* dir, int grid_id, const char* channel, ct_series** out) {
  return guarded([&] {
    require(dir && out, "ingest: null argument");
    const auto ch = channel_from(channel);
    *out = new ct_series{cdr::ingest_dir(dir, grid_id, ch)};
  });
}

ct_status ct_series_synthetic(size_t days, uint64_t seed, ct_series** out) {
  return guarded([&] {
    require(out != nullptr, "synthetic: null output");
    *out = new ct_series{dataset::gen_synthetic(days, seed)};
  });
}

ct_status ct_series_from_values(const double* values, size_t n, int64_t t0_ms, ct_series** out) {
  return guarded([&] {
    require(out != nullptr && (values != nullptr || n == 0), "from_values: null argument");
    cdr::ActivitySeries s{0, cdr::Channel::Internet, t0_ms, std::vector<double>(values, values + n)};
    *out = new ct_series{std::move(s)};
  });
}

ct_status ct_series_read_csv(const char* path, ct_series** out) {
  return guarded([&] {
    require(path && out, "read_csv: null argument");
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, std::string("cannot open ") + path);
    *out = new ct_series{cdr::read_series_csv(in)};
  });
}

ct_status ct_series_write_csv(const ct_series* series, const char* path) {
  return guarded([&] {
    require(series && path, "write_csv: null argument");
    std::ostringstream text;
    cdr::write_series_csv(text, series->series);
    write_text_file(path, text.str());
  });
}

size_t ct_series_length(const ct_series* series) { return series ? series->series.values.size() : 0; }

int64_t ct_series_t0_ms(const ct_series* series) { return series ? series->series.t0_ms : 0; }

const double* ct_series_values(const ct_series* series) { return series ? series->series.values.data() : nullptr; }

void ct_series_free(ct_series* series) { delete series; }

ct_status ct_split(size_t n_total, double train_frac, size_t* n_train, size_t* n_val, size_t* n_test) {
  return guarded([&] {
    const auto s = dataset::split(n_total, train_frac);
    if (n_train) *n_train = s.n_train;
    if (n_val) *n_val = s.n_val;
    if (n_test) *n_test = s.n_test;
  });
}

void ct_train_options_init(ct_train_options* options) {
  if (!options) return;
  const train::TrainConfig defaults;
  *options = ct_train_options{CT_MODEL_LSTM,          0.8,           defaults.window, defaults.epochs,
                              defaults.learning_rate, defaults.batch_size, defaults.seed,   50};
}

ct_status ct_train(const ct_series* series, const ct_train_options* options, ct_model** model,
                   ct_history** history) {
  return guarded([&] {
    require(options && model, "train: null argument");
    auto run = pipeline::train_network(values_of(series), network_options(*options));
    auto* m = new ct_model{std::move(run.network)};
    if (history) {
      try {
        *history = new ct_history{std::move(run.history)};
      } catch (...) {
        delete m;
        throw;
      }
    }
    *model = m;
  });
}

size_t ct_history_length(const ct_history* history) { return history ? history->history.size() : 0; }

ct_status ct_history_get(const ct_history* history, size_t index, double* train_mae, double* val_mae,
                         double* wall_ms) {
  return guarded([&] {
    require(history != nullptr, "history is null");
    require(index < history->history.size(), "history index out of range");
    const auto& r = history->history[index];
    if (train_mae) *train_mae = r.train_mae;
    if (val_mae) *val_mae = r.val_mae;
    if (wall_ms) *wall_ms = r.wall_ms;
  });
}

ct_status ct_history_write_csv(const ct_history* history, const char* path) {
  return guarded([&] {
    require(history && path, "history write: null argument");
    std::ostringstream text;
    pipeline::write_history_csv(text, history->history);
    write_text_file(path, text.str());
  });
}

void ct_history_free(ct_history* history) { delete history; }

void ct_arima_options_init(ct_arima_options* options) {
  if (options) *options = ct_arima_options{0.8, 1, 0, 0, 0};
}

ct_status ct_arima_fit(const ct_series* series, const ct_arima_options* options, ct_model** out) {
  return guarded([&] {
    require(options && out, "arima: null argument");
    std::optional<arima::Order> order;
    if (!options->auto_order) order = arima::Order{options->p, options->d, options->q};
    *out = new ct_model{pipeline::fit_arima(values_of(series), options->train_frac, order)};
  });
}

ct_status ct_model_arima_order(const ct_model* model, int* p, int* d, int* q) {
  return guarded([&] {
    require(model != nullptr, "model is null");
    const auto* m = std::get_if<arima::ArimaModel>(&model->model);
    require(m != nullptr, "model is not an ARIMA model");
    if (p) *p = m->order.p;
    if (d) *d = m->order.d;
    if (q) *q = m->order.q;
  });
}

ct_model_kind ct_model_kind_of(const ct_model* model) {
  if (const auto* net = std::get_if<pipeline::TrainedNetwork>(&model->model)) {
    return net->kind() == pipeline::ModelKind::Lstm ? CT_MODEL_LSTM : CT_MODEL_FFNN;
  }
  return CT_MODEL_ARIMA;
}

ct_status ct_model_save(const ct_model* model, const char* path) {
  return guarded([&] {
    require(model && path, "save: null argument");
    const std::string text =
        std::visit([](const auto& m) -> std::string {
          if constexpr (std::is_same_v<std::decay_t<decltype(m)>, arima::ArimaModel>) {
            return arima::serialize(m);
          } else {
            return m.serialize();
          }
        }, model->model);
    write_text_file(path, text);
  });
}

ct_status ct_model_load(const char* path, ct_model** out) {
  return guarded([&] {
    require(path && out, "load: null argument");
    const std::string text = read_text_file(path);
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_object() && doc.value("type", "") == "arima") {
      *out = new ct_model{arima::deserialize(text)};
    } else {
      *out = new ct_model{pipeline::TrainedNetwork::deserialize(text)};
    }
  });
}

ct_status ct_model_predict_next(const ct_model* model, const double* history, size_t n, double* out) {
  return guarded([&] {
    require(model && out && (history || n == 0), "predict: null argument");
    const std::span<const double> h(history, n);
    if (const auto* net = std::get_if<pipeline::TrainedNetwork>(&model->model)) {
      *out = net->predict_next(h);
    } else {
      *out = arima::forecast_one(std::get<arima::ArimaModel>(model->model), h);
    }
  });
}

ct_status ct_model_evaluate(const ct_model* model, const ct_series* series, double train_frac,
                            const char* predictions_csv, double* test_mae, double* test_mae_normalized) {
  return guarded([&] {
    require(model != nullptr, "evaluate: model is null");
    const auto values = values_of(series);
    const train::Evaluation ev =
        std::holds_alternative<pipeline::TrainedNetwork>(model->model)
            ? pipeline::evaluate_network(std::get<pipeline::TrainedNetwork>(model->model), values, train_frac)
            : pipeline::evaluate_arima(std::get<arima::ArimaModel>(model->model), values, train_frac);
    if (predictions_csv) {
      std::ostringstream text;
      pipeline::write_predictions_csv(text, ev);
      write_text_file(predictions_csv, text.str());
    }
    if (test_mae) *test_mae = ev.mae;
    if (test_mae_normalized) *test_mae_normalized = ev.mae_normalized;
  });
}

void ct_model_free(ct_model* model) { delete model; }

ct_status ct_compare(const ct_series* series, const ct_train_options* options, const char* out_dir) {
  return guarded([&] {
    require(options && out_dir, "compare: null argument");
    const auto net = network_options(ct_train_options{CT_MODEL_LSTM, options->train_frac, options->window,
                                                      options->epochs, options->learning_rate,
                                                      options->batch_size, options->seed, options->hidden});
    pipeline::CompareOptions c;
    c.train_frac = net.train_frac;
    c.hidden = net.hidden;
    c.train = net.train;
    pipeline::compare(values_of(series), c, out_dir);
  });
}

}  // extern "C"
