#include "celltide/pipeline.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "celltide/error.hpp"
#include "celltide/format.hpp"
#include "celltide/serialize.hpp"

namespace celltide::pipeline {

namespace {

// Chronological train slice used to fit scalers and baselines.
std::span<const double> train_slice(std::span<const double> series, const dataset::SplitSpec& split) {
  return series.first(split.train_end());
}

nlohmann::json split_json(const dataset::SplitSpec& s) {
  return {{"n_total", s.n_total}, {"n_train", s.n_train}, {"n_val", s.n_val}, {"n_test", s.n_test}};
}

}  // namespace

std::string_view model_name(ModelKind kind) { return kind == ModelKind::Lstm ? "lstm" : "ffnn"; }

PreparedData prepare(std::span<const double> series, double train_frac, std::size_t window) {
  PreparedData data;
  data.split = dataset::split(series.size(), train_frac);
  if (data.split.n_train <= window) {
    fail(ErrorCode::InvalidArgument, "training slice of " + std::to_string(data.split.n_train) +
                                         " samples is too short for window " + std::to_string(window));
  }
  data.scaler = dataset::fit_scaler(train_slice(series, data.split));
  data.normalized = dataset::transform(series, data.scaler);
  data.train = dataset::windows_for_targets(data.normalized, window, window, data.split.train_end());
  data.val = dataset::windows_for_targets(data.normalized, window, data.split.val_begin(), data.split.test_begin());
  return data;
}

double TrainedNetwork::predict_normalized(std::span<const double> window) const {
  return std::visit([&](const auto& p) { return predict(window, p); }, params);
}

double TrainedNetwork::predict_next(std::span<const double> history) const {
  if (history.size() < window) {
    fail(ErrorCode::InvalidArgument, "prediction needs " + std::to_string(window) + " past values, got " +
                                         std::to_string(history.size()));
  }
  const auto normalized = dataset::transform(history.last(window), scaler);
  return scaler.inverse(predict_normalized(normalized));
}

std::string TrainedNetwork::serialize() const {
  if (const auto* p = std::get_if<lstm::LstmParams>(&params)) return lstm::serialize(*p, window, scaler);
  return ffnn::serialize(std::get<ffnn::FfnnParams>(params), scaler);
}

TrainedNetwork TrainedNetwork::deserialize(std::string_view text) {
  const auto doc = nlohmann::json::parse(text, nullptr, false);
  const std::string type = doc.is_object() && doc.contains("type") && doc["type"].is_string() ? doc["type"] : "";
  if (type == "ffnn") {
    auto file = ffnn::deserialize(text);
    const std::size_t window = file.params.window;
    return {std::move(file.params), window, file.scaler};
  }
  auto file = lstm::deserialize(text);
  return {std::move(file.params), file.window, file.scaler};
}

NetworkRun train_network(std::span<const double> series, const NetworkOptions& options) {
  train::validate(options.train);
  const PreparedData data = prepare(series, options.train_frac, options.train.window);
  NetworkRun run{{}, {}, data.split};
  run.network.window = options.train.window;
  run.network.scaler = data.scaler;
  if (options.kind == ModelKind::Lstm) {
    auto fitted = train::fit(lstm::init_params(options.hidden, 1, options.train.seed), data.train, data.val,
                             options.train);
    run.network.params = std::move(fitted.params);
    run.history = std::move(fitted.history);
  } else {
    auto fitted = train::fit(ffnn::init_params(options.train.window, options.train.seed), data.train, data.val,
                             options.train);
    run.network.params = std::move(fitted.params);
    run.history = std::move(fitted.history);
  }
  return run;
}

train::Evaluation evaluate_network(const TrainedNetwork& net, std::span<const double> series, double train_frac) {
  const auto split = dataset::split(series.size(), train_frac);
  return train::evaluate([&](std::span<const double> w) { return net.predict_normalized(w); }, series, split,
                         net.window, net.scaler);
}

arima::ArimaModel fit_arima(std::span<const double> series, double train_frac, std::optional<arima::Order> order) {
  const auto split = dataset::split(series.size(), train_frac);
  const auto head = train_slice(series, split);
  return arima::fit(head, order ? *order : arima::auto_order(head));
}

train::Evaluation evaluate_arima(const arima::ArimaModel& model, std::span<const double> series, double train_frac) {
  const auto split = dataset::split(series.size(), train_frac);
  const auto scaler = dataset::fit_scaler(train_slice(series, split));
  auto predictions = arima::rolling_forecast(model, series, split.test_begin(), split.n_total);
  return train::score(std::move(predictions), series, split.test_begin(), scaler);
}

void write_history_csv(std::ostream& out, const train::History& history) {
  out << "epoch,train_mae,val_mae,wall_ms\n";
  for (const auto& r : history) {
    out << r.epoch << ',' << format_double(r.train_mae) << ',' << format_double(r.val_mae) << ','
        << format_double(r.wall_ms) << '\n';
  }
}

void write_predictions_csv(std::ostream& out, const train::Evaluation& evaluation) {
  out << "slot,truth,prediction\n";
  for (std::size_t i = 0; i < evaluation.predictions.size(); ++i) {
    out << evaluation.first_slot + i << ',' << format_double(evaluation.truth[i]) << ','
        << format_double(evaluation.predictions[i]) << '\n';
  }
}

nlohmann::json compare(std::span<const double> series, const CompareOptions& options,
                       const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<fs::path> written;
  const auto emit = [&](const std::string& name, const std::string& text) {
    const auto path = out_dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
    // Only files this call created or truncated are removed on failure.
    written.push_back(path);
    out << text;
    if (!out.flush()) fail(ErrorCode::Io, "write failed for " + path.string());
  };

  try {
    const auto split = dataset::split(series.size(), options.train_frac);
    nlohmann::json models = nlohmann::json::object();
    for (const ModelKind kind : {ModelKind::Lstm, ModelKind::Ffnn}) {
      const auto run = train_network(series, {kind, options.train_frac, options.hidden, options.train});
      const auto ev = evaluate_network(run.network, series, options.train_frac);
      const std::string name(model_name(kind));
      std::ostringstream history, predictions;
      write_history_csv(history, run.history);
      write_predictions_csv(predictions, ev);
      emit(name + "_history.csv", history.str());
      emit(name + "_predictions.csv", predictions.str());
      double wall = 0.0;
      for (const auto& r : run.history) wall += r.wall_ms;
      models[name] = {{"test_mae", ev.mae},
                      {"test_mae_normalized", ev.mae_normalized},
                      {"epochs", run.history.size()},
                      {"final_train_mae", run.history.back().train_mae},
                      {"final_val_mae", run.history.back().val_mae},
                      {"train_wall_ms", wall}};
    }

    const auto model = fit_arima(series, options.train_frac, options.arima_order);
    const auto ev = evaluate_arima(model, series, options.train_frac);
    std::ostringstream predictions;
    write_predictions_csv(predictions, ev);
    emit("arima_predictions.csv", predictions.str());
    models["arima"] = {{"test_mae", ev.mae},
                       {"test_mae_normalized", ev.mae_normalized},
                       {"order", {{"p", model.order.p}, {"d", model.order.d}, {"q", model.order.q}}}};

    nlohmann::json report;
    report["seed"] = options.train.seed;
    report["config"] = {{"train_frac", options.train_frac},
                        {"window", options.train.window},
                        {"epochs", options.train.epochs},
                        {"learning_rate", options.train.learning_rate},
                        {"batch_size", options.train.batch_size},
                        {"hidden", options.hidden},
                        {"arima_order", options.arima_order ? "fixed" : "auto"}};
    report["split"] = split_json(split);
    report["models"] = models;
    emit("report.json", dump_json(report));
    return report;
  } catch (...) {
    for (const auto& path : written) fs::remove(path, ec);
    throw;
  }
}

}  // namespace celltide::pipeline
