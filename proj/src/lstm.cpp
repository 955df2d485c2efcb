#include "celltide/lstm.hpp"

#include <cmath>

#include "celltide/error.hpp"
#include "celltide/format.hpp"
#include "celltide/rng.hpp"
#include "celltide/serialize.hpp"

namespace celltide::lstm {

using linalg::sigmoid;

namespace {

void glorot_fill(Matrix& m, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (double& w : m.span()) w = rng.uniform(-limit, limit);
}

double head_activation(Head head, double z) { return head == Head::Sigmoid ? sigmoid(z) : z; }

void check_shapes(const LstmParams& p) {
  const std::size_t h = p.hidden;
  const std::size_t cols = h + p.input;
  for (const Matrix* m : {&p.w_f, &p.w_i, &p.w_c, &p.w_o}) {
    if (m->rows() != h || m->cols() != cols) {
      fail(ErrorCode::InvalidArgument, "lstm: gate matrix " + m->shape() + " inconsistent with hidden size " +
                                           std::to_string(h));
    }
  }
  for (const Vector* b : {&p.b_f, &p.b_i, &p.b_c, &p.b_o}) {
    if (b->size() != h) fail(ErrorCode::InvalidArgument, "lstm: gate bias length inconsistent with hidden size");
  }
  if (p.w_y.rows() != 1 || p.w_y.cols() != h || p.b_y.size() != 1) {
    fail(ErrorCode::InvalidArgument, "lstm: output head inconsistent with hidden size");
  }
}

// W·v + b
Vector affine(const Matrix& w, const Vector& v, const Vector& b) {
  Vector z = linalg::matvec(w, v);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += b[i];
  return z;
}

}  // namespace

LstmParams LstmParams::zeros(std::size_t hidden, std::size_t input, Head head) {
  if (hidden == 0 || input == 0) fail(ErrorCode::InvalidArgument, "lstm: hidden and input sizes must be positive");
  const std::size_t cols = hidden + input;
  return LstmParams{hidden,
                    input,
                    head,
                    Matrix(hidden, cols),
                    Matrix(hidden, cols),
                    Matrix(hidden, cols),
                    Matrix(hidden, cols),
                    Vector(hidden),
                    Vector(hidden),
                    Vector(hidden),
                    Vector(hidden),
                    Matrix(1, hidden),
                    Vector(1)};
}

std::vector<std::span<double>> LstmParams::tensors() {
  return {w_f.span(), w_i.span(), w_c.span(), w_o.span(), b_f.span(),
          b_i.span(), b_c.span(), b_o.span(), w_y.span(), b_y.span()};
}

std::vector<std::span<const double>> LstmParams::tensors() const {
  return {w_f.span(), w_i.span(), w_c.span(), w_o.span(), b_f.span(),
          b_i.span(), b_c.span(), b_o.span(), w_y.span(), b_y.span()};
}

const std::vector<std::string>& LstmParams::tensor_names() {
  static const std::vector<std::string> names = {"W_f", "W_i", "W_c", "W_o", "b_f",
                                                 "b_i", "b_c", "b_o", "W_y", "b_y"};
  return names;
}

std::size_t LstmParams::scalar_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += t.size();
  return n;
}

LstmParams init_params(std::size_t hidden, std::size_t input, std::uint64_t seed, Head head) {
  LstmParams p = LstmParams::zeros(hidden, input, head);
  Rng rng(seed);
  for (Matrix* m : {&p.w_f, &p.w_i, &p.w_c, &p.w_o, &p.w_y}) glorot_fill(*m, rng);
  for (std::size_t i = 0; i < hidden; ++i) p.b_f[i] = 1.0;
  return p;
}

std::pair<LstmState, StepCache> cell_forward(const Vector& x, const LstmState& prev, const LstmParams& p) {
  if (x.size() != p.input || prev.a.size() != p.hidden || prev.c.size() != p.hidden) {
    fail(ErrorCode::InvalidArgument, "lstm cell: input/state shapes do not match parameters");
  }
  StepCache s;
  s.concat = linalg::concat(prev.a, x);
  s.forget = linalg::sigmoid(affine(p.w_f, s.concat, p.b_f));
  s.update = linalg::sigmoid(affine(p.w_i, s.concat, p.b_i));
  s.candidate = linalg::tanh_act(affine(p.w_c, s.concat, p.b_c));
  s.output = linalg::sigmoid(affine(p.w_o, s.concat, p.b_o));
  s.c_prev = prev.c;
  s.c = linalg::vec_add(linalg::hadamard(s.forget, prev.c), linalg::hadamard(s.update, s.candidate));
  s.tanh_c = linalg::tanh_act(s.c);
  s.a = linalg::hadamard(s.output, s.tanh_c);
  LstmState next{s.a, s.c};
  return {std::move(next), std::move(s)};
}

ForwardResult forward(std::span<const double> window, const LstmParams& p) {
  check_shapes(p);
  if (window.empty() || window.size() % p.input != 0) {
    fail(ErrorCode::InvalidArgument, "lstm forward: window of " + std::to_string(window.size()) +
                                         " values is not a positive multiple of input size");
  }
  const std::size_t steps = window.size() / p.input;
  ForwardResult out;
  out.steps.reserve(steps);
  LstmState state{Vector(p.hidden), Vector(p.hidden)};
  for (std::size_t t = 0; t < steps; ++t) {
    Vector x(std::vector<double>(window.begin() + static_cast<std::ptrdiff_t>(t * p.input),
                                 window.begin() + static_cast<std::ptrdiff_t>((t + 1) * p.input)));
    auto [next, cache] = cell_forward(x, state, p);
    state = std::move(next);
    out.steps.push_back(std::move(cache));
  }
  double z = p.b_y[0];
  for (std::size_t j = 0; j < p.hidden; ++j) z += p.w_y(0, j) * state.a[j];
  out.y_hat = head_activation(p.head, z);
  return out;
}

double predict(std::span<const double> window, const LstmParams& p) { return forward(window, p).y_hat; }

void accumulate_gradients(const ForwardResult& fwd, double d_loss_d_yhat, const LstmParams& p, LstmParams& grads) {
  const std::size_t h = p.hidden;
  if (fwd.steps.empty() || fwd.steps.back().a.size() != h || fwd.steps.front().concat.size() != h + p.input) {
    fail(ErrorCode::InvalidArgument, "lstm backward: forward cache does not match parameters");
  }
  if (grads.hidden != h || grads.input != p.input) {
    fail(ErrorCode::InvalidArgument, "lstm backward: gradient buffer does not match parameters");
  }

  const double y = fwd.y_hat;
  const double dz = p.head == Head::Sigmoid ? d_loss_d_yhat * y * (1.0 - y) : d_loss_d_yhat;
  const Vector& a_last = fwd.steps.back().a;
  for (std::size_t j = 0; j < h; ++j) grads.w_y(0, j) += dz * a_last[j];
  grads.b_y[0] += dz;

  Vector da(h);
  for (std::size_t j = 0; j < h; ++j) da[j] = p.w_y(0, j) * dz;
  Vector dc(h);
  Vector dz_f(h), dz_i(h), dz_c(h), dz_o(h);

  for (std::size_t t = fwd.steps.size(); t-- > 0;) {
    const StepCache& s = fwd.steps[t];
    for (std::size_t j = 0; j < h; ++j) {
      const double o = s.output[j];
      const double f = s.forget[j];
      const double i = s.update[j];
      const double u = s.candidate[j];
      const double tc = s.tanh_c[j];
      dz_o[j] = da[j] * tc * o * (1.0 - o);
      const double dcj = dc[j] + da[j] * o * (1.0 - tc * tc);
      dz_f[j] = dcj * s.c_prev[j] * f * (1.0 - f);
      dz_i[j] = dcj * u * i * (1.0 - i);
      dz_c[j] = dcj * i * (1.0 - u * u);
      dc[j] = dcj * f;
    }
    linalg::add_outer(grads.w_f, dz_f, s.concat);
    linalg::add_outer(grads.w_i, dz_i, s.concat);
    linalg::add_outer(grads.w_c, dz_c, s.concat);
    linalg::add_outer(grads.w_o, dz_o, s.concat);
    for (std::size_t j = 0; j < h; ++j) {
      grads.b_f[j] += dz_f[j];
      grads.b_i[j] += dz_i[j];
      grads.b_c[j] += dz_c[j];
      grads.b_o[j] += dz_o[j];
    }
    if (t == 0) break;
    // d concat = Σ_gates Wᵀ dz; only the a(t-1) part feeds further back.
    std::fill(da.span().begin(), da.span().end(), 0.0);
    for (const auto& [w, g] : {std::pair{&p.w_f, &dz_f}, std::pair{&p.w_i, &dz_i}, std::pair{&p.w_c, &dz_c},
                               std::pair{&p.w_o, &dz_o}}) {
      for (std::size_t r = 0; r < h; ++r) {
        const double gr = (*g)[r];
        const auto row = w->row(r);
        for (std::size_t j = 0; j < h; ++j) da[j] += row[j] * gr;
      }
    }
  }
}

LstmParams backward(const ForwardResult& fwd, double d_loss_d_yhat, const LstmParams& p) {
  LstmParams grads = LstmParams::zeros(p.hidden, p.input, p.head);
  accumulate_gradients(fwd, d_loss_d_yhat, p, grads);
  return grads;
}

std::string serialize(const LstmParams& p, std::size_t window, const dataset::ScalerParams& scaler) {
  nlohmann::json doc;
  doc["type"] = "lstm";
  doc["hidden"] = p.hidden;
  doc["input"] = p.input;
  doc["T"] = window;
  doc["head"] = p.head == Head::Sigmoid ? "sigmoid" : "linear";
  doc["scaler"] = scaler_to_json(scaler);
  nlohmann::json weights = nlohmann::json::object();
  const auto names = LstmParams::tensor_names();
  const auto tensors = p.tensors();
  for (std::size_t k = 0; k < names.size(); ++k) weights[names[k]] = std::vector<double>(tensors[k].begin(), tensors[k].end());
  doc["weights"] = std::move(weights);
  return dump_json(doc);
}

LstmFile deserialize(std::string_view text) {
  const nlohmann::json doc = parse_model_json(text, "lstm");
  const auto hidden = require_count(doc, "hidden");
  const auto input = doc.contains("input") ? require_count(doc, "input") : std::size_t{1};
  Head head = Head::Sigmoid;
  if (doc.contains("head")) {
    const auto h = require_string(doc, "head");
    if (h == "linear") {
      head = Head::Linear;
    } else if (h != "sigmoid") {
      fail(ErrorCode::Parse, "head: expected \"sigmoid\" or \"linear\"");
    }
  }
  LstmFile file{LstmParams::zeros(hidden, input, head), require_count(doc, "T"), scaler_from_json(doc)};
  const auto& weights = require_field(doc, "weights");
  const auto names = LstmParams::tensor_names();
  auto tensors = file.params.tensors();
  for (std::size_t k = 0; k < names.size(); ++k) read_tensor(weights, "weights", names[k], tensors[k]);
  return file;
}

}  // namespace celltide::lstm
