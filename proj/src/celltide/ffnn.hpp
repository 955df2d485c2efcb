#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "celltide/dataset.hpp"
#include "celltide/linalg.hpp"

namespace celltide::ffnn {

using linalg::Matrix;
using linalg::Vector;

inline constexpr std::size_t kHiddenUnits = 5;

/// T inputs → relu hidden layer → one sigmoid unit.
struct FfnnParams {
  std::size_t window = 0;
  Matrix w1;  // hidden × T
  Vector b1;
  Matrix w2;  // 1 × hidden
  Vector b2;

  static FfnnParams zeros(std::size_t window, std::size_t hidden = kHiddenUnits);

  std::size_t hidden() const noexcept { return b1.size(); }
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;
  static const std::vector<std::string>& tensor_names();
  std::size_t scalar_count() const;
  bool operator==(const FfnnParams&) const = default;
};

struct ForwardResult {
  double y_hat = 0.0;
  Vector x;
  Vector pre_hidden;
  Vector hidden;
};

FfnnParams init_params(std::size_t window, std::uint64_t seed, std::size_t hidden = kHiddenUnits);

ForwardResult forward(std::span<const double> window, const FfnnParams& p);
double predict(std::span<const double> window, const FfnnParams& p);

/// relu'(0) is taken as 0.
void accumulate_gradients(const ForwardResult& fwd, double d_loss_d_yhat, const FfnnParams& p, FfnnParams& grads);
FfnnParams backward(const ForwardResult& fwd, double d_loss_d_yhat, const FfnnParams& p);

struct FfnnFile {
  FfnnParams params;
  dataset::ScalerParams scaler;
};

std::string serialize(const FfnnParams& p, const dataset::ScalerParams& scaler);
FfnnFile deserialize(std::string_view text);

}  // namespace celltide::ffnn
