#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "celltide/dataset.hpp"
#include "celltide/linalg.hpp"

namespace celltide::lstm {

using linalg::Matrix;
using linalg::Vector;

enum class Head { Sigmoid, Linear };

/// Weights of a single LSTM layer with a one-unit dense head.
///
/// Every gate matrix is H × (H + input) and acts on the concatenation
/// [a(t-1), x(t)], hidden state first.
struct LstmParams {
  std::size_t hidden = 0;
  std::size_t input = 1;
  Head head = Head::Sigmoid;
  Matrix w_f, w_i, w_c, w_o;
  Vector b_f, b_i, b_c, b_o;
  Matrix w_y;
  Vector b_y;

  static LstmParams zeros(std::size_t hidden, std::size_t input = 1, Head head = Head::Sigmoid);

  /// Tensors in serialization order; see tensor_names().
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;
  static const std::vector<std::string>& tensor_names();

  std::size_t scalar_count() const;
  bool operator==(const LstmParams&) const = default;
};

struct LstmState {
  Vector a;
  Vector c;
};

/// Everything one cell step needs to be differentiated later.
struct StepCache {
  Vector concat;  // [a(t-1), x(t)]
  Vector forget;
  Vector update;
  Vector candidate;
  Vector output;
  Vector c_prev;
  Vector c;
  Vector tanh_c;
  Vector a;
};

struct ForwardResult {
  double y_hat = 0.0;
  std::vector<StepCache> steps;
};

/// Glorot-uniform weights from a seeded stream, zero biases except b_f = 1.
LstmParams init_params(std::size_t hidden, std::size_t input, std::uint64_t seed, Head head = Head::Sigmoid);

std::pair<LstmState, StepCache> cell_forward(const Vector& x, const LstmState& prev, const LstmParams& p);

/// Runs the chain from a zero state over `window` (T · input values) and
/// emits the head output for the last step.
ForwardResult forward(std::span<const double> window, const LstmParams& p);

double predict(std::span<const double> window, const LstmParams& p);

/// Backpropagation through time. Adds d(loss)/d(param) into `grads`, which
/// must have the shapes of `p`.
void accumulate_gradients(const ForwardResult& fwd, double d_loss_d_yhat, const LstmParams& p, LstmParams& grads);

LstmParams backward(const ForwardResult& fwd, double d_loss_d_yhat, const LstmParams& p);

struct LstmFile {
  LstmParams params;
  std::size_t window = 0;
  dataset::ScalerParams scaler;
};

std::string serialize(const LstmParams& p, std::size_t window, const dataset::ScalerParams& scaler);
LstmFile deserialize(std::string_view text);

}  // namespace celltide::lstm
