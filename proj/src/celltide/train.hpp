#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "celltide/dataset.hpp"
#include "celltide/error.hpp"
#include "celltide/rng.hpp"

namespace celltide::train {

struct TrainConfig {
  std::size_t epochs = 20;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  std::size_t window = 12;
};

void validate(const TrainConfig& config);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_mae = 0.0;
  double val_mae = 0.0;
  double wall_ms = 0.0;
};

using History = std::vector<EpochRecord>;

double mae(std::span<const double> pred, std::span<const double> truth);

/// d|e|/de with the subgradient at 0 taken as 0.
inline double abs_subgradient(double e) { return e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0); }

/// Adam (β1 = 0.9, β2 = 0.999, ε = 1e-8) with bias correction.
class AdamState {
 public:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  AdamState() = default;
  explicit AdamState(const std::vector<std::span<const double>>& shapes);

  std::size_t step_count() const noexcept { return step_; }
  const std::vector<std::vector<double>>& first_moment() const noexcept { return m_; }
  const std::vector<std::vector<double>>& second_moment() const noexcept { return v_; }

  void step(const std::vector<std::span<double>>& params, const std::vector<std::span<const double>>& grads,
            double learning_rate);

 private:
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t step_ = 0;
};

template <typename Params>
std::vector<std::span<const double>> const_tensors(const Params& p) {
  return p.tensors();
}

template <typename Params>
void adam_step(Params& params, const Params& grads, AdamState& state, double learning_rate) {
  state.step(params.tensors(), grads.tensors(), learning_rate);
}

template <typename Params>
void zero(Params& p) {
  for (auto t : p.tensors()) std::fill(t.begin(), t.end(), 0.0);
}

template <typename Params>
bool all_finite(const Params& p) {
  for (auto t : p.tensors()) {
    for (double v : t) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

template <typename Params>
double mean_abs_error(const Params& params, const dataset::WindowSet& set) {
  double total = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) total += std::abs(predict(set.input(i), params) - set.targets[i]);
  return total / static_cast<double>(set.size());
}

template <typename Params>
struct FitResult {
  Params params;
  History history;
};

/// Mini-batch Adam on the MAE loss. `predict`, `forward` and
/// `accumulate_gradients` are found by argument-dependent lookup in the
/// namespace of Params.
template <typename Params>
FitResult<Params> fit(Params params, const dataset::WindowSet& train_set, const dataset::WindowSet& val_set,
                      const TrainConfig& config) {
  validate(config);
  if (train_set.size() == 0 || val_set.size() == 0) {
    fail(ErrorCode::InvalidArgument, "training and validation sets must be nonempty");
  }
  AdamState adam(const_tensors(params));
  Params grads = params;
  Rng order_rng(config.seed ^ 0x9e37'79b9'7f4a'7c15ULL);
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  FitResult<Params> out{std::move(params), {}};
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    order_rng.shuffle(std::span<std::size_t>(order));
    double abs_error_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const double scale = 1.0 / static_cast<double>(end - begin);
      zero(grads);
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t i = order[k];
        const auto fwd = forward(train_set.input(i), out.params);
        const double err = fwd.y_hat - train_set.targets[i];
        abs_error_sum += std::abs(err);
        accumulate_gradients(fwd, abs_subgradient(err) * scale, out.params, grads);
      }
      adam_step(out.params, grads, adam, config.learning_rate);
    }
    const double train_mae = abs_error_sum / static_cast<double>(order.size());
    const double val_mae = mean_abs_error(out.params, val_set);
    if (!std::isfinite(train_mae) || !std::isfinite(val_mae) || !all_finite(out.params)) {
      fail(ErrorCode::Numeric, "training diverged at epoch " + std::to_string(epoch));
    }
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started);
    out.history.push_back({epoch, train_mae, val_mae, elapsed.count()});
  }
  return out;
}

/// Window → normalized prediction.
using Predictor = std::function<double(std::span<const double>)>;

struct Evaluation {
  std::size_t first_slot = 0;
  std::vector<double> truth;        // original scale
  std::vector<double> predictions;  // original scale
  double mae = 0.0;
  double mae_normalized = 0.0;
};

/// Rolling one-step predictions over the test slice from true history windows.
Evaluation evaluate(const Predictor& model, std::span<const double> series, const dataset::SplitSpec& split,
                    std::size_t window, const std::optional<dataset::ScalerParams>& scaler);

/// Fills the error fields of an evaluation whose predictions are already on
/// the original scale (used for the ARIMA baseline).
Evaluation score(std::vector<double> predictions, std::span<const double> series, std::size_t first_slot,
                 const dataset::ScalerParams& scaler);

}  // namespace celltide::train
