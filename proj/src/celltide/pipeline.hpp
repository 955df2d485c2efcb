#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "celltide/arima.hpp"
#include "celltide/dataset.hpp"
#include "celltide/ffnn.hpp"
#include "celltide/lstm.hpp"
#include "celltide/train.hpp"

namespace celltide::pipeline {

enum class ModelKind { Lstm, Ffnn };

std::string_view model_name(ModelKind kind);

/// Split, train-only scaler, and the normalized train/validation windows.
struct PreparedData {
  dataset::SplitSpec split;
  dataset::ScalerParams scaler;
  std::vector<double> normalized;
  dataset::WindowSet train;
  dataset::WindowSet val;
};

PreparedData prepare(std::span<const double> series, double train_frac, std::size_t window);

struct NetworkOptions {
  ModelKind kind = ModelKind::Lstm;
  double train_frac = 0.8;
  std::size_t hidden = 50;
  train::TrainConfig train;
};

/// A trained LSTM or FFNN together with the scaler it was trained under.
struct TrainedNetwork {
  std::variant<lstm::LstmParams, ffnn::FfnnParams> params;
  std::size_t window = 0;
  dataset::ScalerParams scaler;

  ModelKind kind() const noexcept { return params.index() == 0 ? ModelKind::Lstm : ModelKind::Ffnn; }
  /// Normalized window → normalized prediction.
  double predict_normalized(std::span<const double> window) const;
  /// Next value on the original scale from the last `window` raw values.
  double predict_next(std::span<const double> history) const;
  std::string serialize() const;
  static TrainedNetwork deserialize(std::string_view text);
};

struct NetworkRun {
  TrainedNetwork network;
  train::History history;
  dataset::SplitSpec split;
};

NetworkRun train_network(std::span<const double> series, const NetworkOptions& options);

train::Evaluation evaluate_network(const TrainedNetwork& net, std::span<const double> series, double train_frac);

struct ArimaRun {
  arima::ArimaModel model;
  train::Evaluation evaluation;
};

/// Fits on the training slice (auto order when `order` is empty) and rolls
/// one-step forecasts across the test slice.
arima::ArimaModel fit_arima(std::span<const double> series, double train_frac, std::optional<arima::Order> order);
train::Evaluation evaluate_arima(const arima::ArimaModel& model, std::span<const double> series, double train_frac);

void write_history_csv(std::ostream& out, const train::History& history);
void write_predictions_csv(std::ostream& out, const train::Evaluation& evaluation);

struct CompareOptions {
  double train_frac = 0.8;
  std::size_t hidden = 50;
  train::TrainConfig train;
  std::optional<arima::Order> arima_order;
};

/// Trains both networks and the ARIMA baseline on one split and writes
/// {lstm,ffnn}_history.csv, {lstm,ffnn,arima}_predictions.csv and report.json
/// into `out_dir`. On failure every file written so far is removed.
nlohmann::json compare(std::span<const double> series, const CompareOptions& options,
                       const std::filesystem::path& out_dir);

}  // namespace celltide::pipeline
