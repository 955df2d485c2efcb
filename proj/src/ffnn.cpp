#include "celltide/ffnn.hpp"

#include <cmath>

#include "celltide/error.hpp"
#include "celltide/format.hpp"
#include "celltide/rng.hpp"
#include "celltide/serialize.hpp"

namespace celltide::ffnn {

FfnnParams FfnnParams::zeros(std::size_t window, std::size_t hidden) {
  if (window == 0 || hidden == 0) fail(ErrorCode::InvalidArgument, "ffnn: window and hidden sizes must be positive");
  return {window, Matrix(hidden, window), Vector(hidden), Matrix(1, hidden), Vector(1)};
}

std::vector<std::span<double>> FfnnParams::tensors() { return {w1.span(), b1.span(), w2.span(), b2.span()}; }

std::vector<std::span<const double>> FfnnParams::tensors() const {
  return {w1.span(), b1.span(), w2.span(), b2.span()};
}

const std::vector<std::string>& FfnnParams::tensor_names() {
  static const std::vector<std::string> names = {"W1", "b1", "W2", "b2"};
  return names;
}

std::size_t FfnnParams::scalar_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += t.size();
  return n;
}

FfnnParams init_params(std::size_t window, std::uint64_t seed, std::size_t hidden) {
  FfnnParams p = FfnnParams::zeros(window, hidden);
  Rng rng(seed);
  for (Matrix* m : {&p.w1, &p.w2}) {
    const double limit = std::sqrt(6.0 / static_cast<double>(m->rows() + m->cols()));
    for (double& w : m->span()) w = rng.uniform(-limit, limit);
  }
  return p;
}

ForwardResult forward(std::span<const double> window, const FfnnParams& p) {
  if (window.size() != p.window || p.w1.rows() != p.hidden() || p.w1.cols() != p.window || p.w2.cols() != p.hidden()) {
    fail(ErrorCode::InvalidArgument, "ffnn forward: window of " + std::to_string(window.size()) +
                                         " values does not match parameters for T=" + std::to_string(p.window));
  }
  ForwardResult out;
  out.x = Vector(std::vector<double>(window.begin(), window.end()));
  out.pre_hidden = linalg::vec_add(linalg::matvec(p.w1, out.x), p.b1);
  out.hidden = linalg::relu(out.pre_hidden);
  double z = p.b2[0];
  for (std::size_t j = 0; j < p.hidden(); ++j) z += p.w2(0, j) * out.hidden[j];
  out.y_hat = linalg::sigmoid(z);
  return out;
}

double predict(std::span<const double> window, const FfnnParams& p) { return forward(window, p).y_hat; }

void accumulate_gradients(const ForwardResult& fwd, double d_loss_d_yhat, const FfnnParams& p, FfnnParams& grads) {
  if (fwd.x.size() != p.window || fwd.hidden.size() != p.hidden()) {
    fail(ErrorCode::InvalidArgument, "ffnn backward: forward cache does not match parameters");
  }
  if (grads.window != p.window || grads.hidden() != p.hidden()) {
    fail(ErrorCode::InvalidArgument, "ffnn backward: gradient buffer does not match parameters");
  }
  const double y = fwd.y_hat;
  const double dz2 = d_loss_d_yhat * y * (1.0 - y);
  grads.b2[0] += dz2;
  Vector dz1(p.hidden());
  for (std::size_t j = 0; j < p.hidden(); ++j) {
    grads.w2(0, j) += dz2 * fwd.hidden[j];
    dz1[j] = fwd.pre_hidden[j] > 0.0 ? p.w2(0, j) * dz2 : 0.0;
    grads.b1[j] += dz1[j];
  }
  linalg::add_outer(grads.w1, dz1, fwd.x);
}

FfnnParams backward(const ForwardResult& fwd, double d_loss_d_yhat, const FfnnParams& p) {
  FfnnParams grads = FfnnParams::zeros(p.window, p.hidden());
  accumulate_gradients(fwd, d_loss_d_yhat, p, grads);
  return grads;
}

std::string serialize(const FfnnParams& p, const dataset::ScalerParams& scaler) {
  nlohmann::json doc;
  doc["type"] = "ffnn";
  doc["hidden"] = p.hidden();
  doc["T"] = p.window;
  doc["scaler"] = scaler_to_json(scaler);
  nlohmann::json weights = nlohmann::json::object();
  const auto names = FfnnParams::tensor_names();
  const auto tensors = p.tensors();
  for (std::size_t k = 0; k < names.size(); ++k) {
    weights[names[k]] = std::vector<double>(tensors[k].begin(), tensors[k].end());
  }
  doc["weights"] = std::move(weights);
  return dump_json(doc);
}

FfnnFile deserialize(std::string_view text) {
  const nlohmann::json doc = parse_model_json(text, "ffnn");
  FfnnFile file{FfnnParams::zeros(require_count(doc, "T"), require_count(doc, "hidden")), scaler_from_json(doc)};
  const auto& weights = require_field(doc, "weights");
  const auto names = FfnnParams::tensor_names();
  auto tensors = file.params.tensors();
  for (std::size_t k = 0; k < names.size(); ++k) read_tensor(weights, "weights", names[k], tensors[k]);
  return file;
}

}  // namespace celltide::ffnn
