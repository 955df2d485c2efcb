#include "celltide/train.hpp"

#include <cmath>

namespace celltide::train {

void validate(const TrainConfig& config) {
  if (config.epochs < 1) fail(ErrorCode::InvalidArgument, "epochs must be at least 1");
  if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate)) {
    fail(ErrorCode::InvalidArgument, "learning rate must be a nonnegative number");
  }
  if (config.batch_size < 1) fail(ErrorCode::InvalidArgument, "batch size must be at least 1");
  if (config.window < 1) fail(ErrorCode::InvalidArgument, "window must be at least 1");
}

double mae(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    fail(ErrorCode::InvalidArgument, "mae: length mismatch " + std::to_string(pred.size()) + " vs " +
                                         std::to_string(truth.size()));
  }
  if (pred.empty()) fail(ErrorCode::InvalidArgument, "mae: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) total += std::abs(pred[i] - truth[i]);
  return total / static_cast<double>(pred.size());
}

AdamState::AdamState(const std::vector<std::span<const double>>& shapes) {
  for (const auto& s : shapes) {
    m_.emplace_back(s.size(), 0.0);
    v_.emplace_back(s.size(), 0.0);
  }
}

void AdamState::step(const std::vector<std::span<double>>& params, const std::vector<std::span<const double>>& grads,
                     double learning_rate) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    fail(ErrorCode::InvalidArgument, "adam: parameter and gradient sets do not match optimizer state");
  }
  for (std::size_t k = 0; k < m_.size(); ++k) {
    if (params[k].size() != m_[k].size() || grads[k].size() != m_[k].size()) {
      fail(ErrorCode::InvalidArgument, "adam: tensor " + std::to_string(k) + " has the wrong shape");
    }
  }
  ++step_;
  const double t = static_cast<double>(step_);
  const double correction1 = 1.0 - std::pow(kBeta1, t);
  const double correction2 = 1.0 - std::pow(kBeta2, t);
  for (std::size_t k = 0; k < m_.size(); ++k) {
    auto& m = m_[k];
    auto& v = v_[k];
    const auto g = grads[k];
    const auto w = params[k];
    for (std::size_t i = 0; i < m.size(); ++i) {
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
      v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      w[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + kEpsilon);
    }
  }
}

Evaluation score(std::vector<double> predictions, std::span<const double> series, std::size_t first_slot,
                 const dataset::ScalerParams& scaler) {
  if (first_slot + predictions.size() > series.size()) {
    fail(ErrorCode::InvalidArgument, "score: predictions extend past the end of the series");
  }
  Evaluation ev;
  ev.first_slot = first_slot;
  ev.truth.assign(series.begin() + static_cast<std::ptrdiff_t>(first_slot),
                  series.begin() + static_cast<std::ptrdiff_t>(first_slot + predictions.size()));
  ev.predictions = std::move(predictions);
  ev.mae = mae(ev.predictions, ev.truth);
  ev.mae_normalized = ev.mae / (scaler.max - scaler.min);
  return ev;
}

Evaluation evaluate(const Predictor& model, std::span<const double> series, const dataset::SplitSpec& split,
                    std::size_t window, const std::optional<dataset::ScalerParams>& scaler) {
  if (!scaler) fail(ErrorCode::InvalidArgument, "evaluate: model has no fitted scaler");
  if (split.n_total != series.size()) {
    fail(ErrorCode::InvalidArgument, "evaluate: split was computed for " + std::to_string(split.n_total) +
                                         " samples but series has " + std::to_string(series.size()));
  }
  const auto normalized = dataset::transform(series, *scaler);
  const auto test = dataset::windows_for_targets(normalized, window, split.test_begin(), split.n_total);
  std::vector<double> predictions(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) predictions[i] = scaler->inverse(model(test.input(i)));
  return score(std::move(predictions), series, split.test_begin(), *scaler);
}

}  // namespace celltide::train
