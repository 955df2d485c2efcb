#include <doctest.h>

#include <cmath>

#include "celltide/dataset.hpp"
#include "celltide/error.hpp"
#include "celltide/ffnn.hpp"
#include "celltide/lstm.hpp"
#include "celltide/pipeline.hpp"
#include "celltide/rng.hpp"
#include "celltide/train.hpp"

using namespace celltide;
using namespace celltide::train;

namespace {

std::vector<double> synthetic(std::size_t days, std::uint64_t seed) {
  return dataset::gen_synthetic(days, seed).values;
}

void check_same_losses(const History& a, const History& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].epoch == b[i].epoch);
    CHECK(a[i].train_mae == b[i].train_mae);
    CHECK(a[i].val_mae == b[i].val_mae);
  }
}

pipeline::NetworkOptions ffnn_options(double frac, std::size_t epochs, std::uint64_t seed) {
  pipeline::NetworkOptions opts;
  opts.kind = pipeline::ModelKind::Ffnn;
  opts.train_frac = frac;
  opts.train.epochs = epochs;
  opts.train.seed = seed;
  return opts;
}

}  // namespace

TEST_CASE("mae") {
  CHECK(mae(std::vector<double>{1, 2}, std::vector<double>{1, 2}) == 0.0);
  CHECK(mae(std::vector<double>{0, 2}, std::vector<double>{1, 1}) == 1.0);
  CHECK_THROWS_AS(mae(std::vector<double>{1}, std::vector<double>{1, 2}), Error);
  CHECK_THROWS_AS(mae(std::vector<double>{}, std::vector<double>{}), Error);

  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.below(500);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.uniform(-10, 10);
      b[i] = rng.uniform(-10, 10);
    }
    long double total = 0.0L;
    for (std::size_t i = 0; i < n; ++i) total += std::fabs(static_cast<long double>(a[i]) - b[i]);
    CHECK(std::abs(mae(a, b) - static_cast<double>(total / n)) <= 1e-12);
  }
}

TEST_CASE("abs subgradient") {
  CHECK(abs_subgradient(2.5) == 1.0);
  CHECK(abs_subgradient(-1e-300) == -1.0);
  CHECK(abs_subgradient(0.0) == 0.0);
}

TEST_CASE("adam first step has magnitude lr") {
  for (double g : {1e-3, 0.5, -7.0, 1e4}) {
    std::vector<double> w = {1.0};
    std::vector<double> grad = {g};
    AdamState adam({std::span<const double>(w)});
    adam.step({std::span<double>(w)}, {std::span<const double>(grad)}, 1e-3);
    CHECK(std::abs(std::abs(w[0] - 1.0) - 1e-3) <= 1e-6);
    CHECK((w[0] < 1.0) == (g > 0.0));
    CHECK(adam.step_count() == 1);
  }
}

TEST_CASE("adam with zero gradient leaves params unchanged") {
  auto p = lstm::init_params(4, 1, 3);
  const auto before = p;
  auto grads = p;
  zero(grads);
  AdamState adam(const_tensors(p));
  for (int i = 0; i < 5; ++i) adam_step(p, grads, adam, 1e-2);
  CHECK(p == before);
  CHECK(adam.step_count() == 5);
  for (const auto& m : adam.first_moment()) {
    for (double v : m) CHECK(v == 0.0);
  }
}

TEST_CASE("adam shape mismatch") {
  std::vector<double> w(3), g(2);
  AdamState adam({std::span<const double>(w)});
  CHECK_THROWS_AS(adam.step({std::span<double>(w)}, {std::span<const double>(g)}, 1e-3), Error);
  CHECK(adam.step_count() == 0);
}

TEST_CASE("adam trajectories are deterministic") {
  Rng rng(5);
  auto p1 = ffnn::init_params(6, 2);
  auto p2 = p1;
  AdamState s1(const_tensors(p1)), s2(const_tensors(p2));
  for (int step = 0; step < 50; ++step) {
    auto g = p1;
    for (auto t : g.tensors()) {
      for (double& v : t) v = rng.normal();
    }
    adam_step(p1, g, s1, 1e-2);
    adam_step(p2, g, s2, 1e-2);
  }
  CHECK(p1 == p2);
  CHECK(s1.second_moment() == s2.second_moment());
}

TEST_CASE("config validation") {
  TrainConfig c;
  CHECK_NOTHROW(validate(c));
  c.epochs = 0;
  CHECK_THROWS_AS(validate(c), Error);
  c = {};
  c.batch_size = 0;
  CHECK_THROWS_AS(validate(c), Error);
  c = {};
  c.learning_rate = -1e-3;
  CHECK_THROWS_AS(validate(c), Error);
  c.learning_rate = std::nan("");
  CHECK_THROWS_AS(validate(c), Error);
}

TEST_CASE("fit history length and determinism") {
  const auto series = synthetic(14, 3);
  const auto opts = ffnn_options(0.8, 20, 11);
  const auto a = pipeline::train_network(series, opts);
  const auto b = pipeline::train_network(series, opts);
  REQUIRE(a.history.size() == 20);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(a.history[i].epoch == i + 1);
    CHECK(a.history[i].train_mae >= 0.0);
    CHECK(a.history[i].val_mae >= 0.0);
  }
  check_same_losses(a.history, b.history);
  CHECK(std::get<ffnn::FfnnParams>(a.network.params) == std::get<ffnn::FfnnParams>(b.network.params));

  auto other = opts;
  other.train.seed = 12;
  const auto c = pipeline::train_network(series, other);
  CHECK(c.history.back().val_mae != a.history.back().val_mae);
}

TEST_CASE("zero learning rate keeps parameters and gives a flat validation curve") {
  const auto series = synthetic(7, 4);
  const auto data = pipeline::prepare(series, 0.8, 12);
  TrainConfig config;
  config.learning_rate = 0.0;
  config.epochs = 4;
  const auto initial = lstm::init_params(6, 1, 9);
  const auto fitted = fit(initial, data.train, data.val, config);
  CHECK(fitted.params == initial);
  for (const auto& r : fitted.history) {
    CHECK(r.val_mae == fitted.history[0].val_mae);
    CHECK(r.train_mae == doctest::Approx(fitted.history[0].train_mae).epsilon(1e-12));
  }
}

TEST_CASE("fit rejects empty sets") {
  const auto data = pipeline::prepare(synthetic(7, 4), 0.8, 12);
  dataset::WindowSet empty;
  CHECK_THROWS_AS(fit(ffnn::init_params(12, 1), empty, data.val, TrainConfig{}), Error);
  CHECK_THROWS_AS(fit(ffnn::init_params(12, 1), data.train, empty, TrainConfig{}), Error);
}

TEST_CASE("divergence is reported with the epoch") {
  const auto data = pipeline::prepare(synthetic(7, 4), 0.8, 12);
  auto p = ffnn::init_params(12, 1);
  p.w2(0, 0) = std::nan("");
  TrainConfig config;
  config.epochs = 3;
  CHECK_THROWS_WITH_AS(fit(p, data.train, data.val, config), doctest::Contains("epoch 1"), Error);
}

TEST_CASE("normalized history is scale free") {
  const auto series = synthetic(14, 6);
  const auto base = pipeline::train_network(series, ffnn_options(0.4, 5, 2));

  // Power-of-two scaling commutes exactly with the min-max transform.
  auto quadrupled = series;
  for (double& v : quadrupled) v *= 4.0;
  check_same_losses(base.history, pipeline::train_network(quadrupled, ffnn_options(0.4, 5, 2)).history);

  auto scaled = series;
  for (double& v : scaled) v *= 3.7;
  const auto other = pipeline::train_network(scaled, ffnn_options(0.4, 5, 2)).history;
  for (std::size_t i = 0; i < other.size(); ++i) {
    CHECK(other[i].train_mae == doctest::Approx(base.history[i].train_mae).epsilon(1e-9));
    CHECK(other[i].val_mae == doctest::Approx(base.history[i].val_mae).epsilon(1e-9));
  }
}

TEST_CASE("evaluate with stub models") {
  const auto series = synthetic(7, 2);
  const auto split = dataset::split(series.size(), 0.8);
  const auto scaler = dataset::fit_scaler(std::span(series).first(split.n_train));
  const std::size_t T = 12;

  // The stub sees the normalized window; it peeks at the next value through the index.
  std::size_t calls = 0;
  const Predictor perfect = [&](std::span<const double>) {
    return scaler.transform(series[split.test_begin() + calls++]);
  };
  const auto exact = evaluate(perfect, series, split, T, scaler);
  CHECK(exact.predictions.size() == split.n_test);
  CHECK(exact.first_slot == split.test_begin());
  CHECK(exact.mae == doctest::Approx(0.0));

  const auto half = evaluate([](std::span<const double>) { return 0.5; }, series, split, T, scaler);
  const double midpoint = (scaler.min + scaler.max) / 2.0;
  double expected = 0.0;
  for (std::size_t t = split.test_begin(); t < split.n_total; ++t) expected += std::abs(series[t] - midpoint);
  expected /= static_cast<double>(split.n_test);
  CHECK(half.mae == doctest::Approx(expected).epsilon(1e-12));
  CHECK(half.mae_normalized == doctest::Approx(expected / (scaler.max - scaler.min)).epsilon(1e-12));

  CHECK_THROWS_AS(evaluate(perfect, series, split, T, std::nullopt), Error);
  CHECK_THROWS_AS(evaluate(perfect, std::span(series).first(100), split, T, scaler), Error);
}

TEST_CASE("evaluate feeds the true preceding window") {
  const auto series = synthetic(7, 2);
  const auto split = dataset::split(series.size(), 0.8);
  const auto scaler = dataset::fit_scaler(std::span(series).first(split.n_train));
  std::size_t i = 0;
  const Predictor last = [&](std::span<const double> w) {
    REQUIRE(w.size() == 5);
    const std::size_t target = split.test_begin() + i++;
    for (std::size_t k = 0; k < 5; ++k) CHECK(w[k] == scaler.transform(series[target - 5 + k]));
    return w.back();
  };
  const auto ev = evaluate(last, series, split, 5, scaler);
  CHECK(ev.predictions.front() == doctest::Approx(series[split.test_begin() - 1]).epsilon(1e-12));
}

TEST_CASE("LSTM converges on the medium synthetic split") {
  pipeline::NetworkOptions opts;
  opts.kind = pipeline::ModelKind::Lstm;
  opts.train_frac = 0.4;
  opts.train.seed = 1;
  const auto run = pipeline::train_network(synthetic(62, 7), opts);
  REQUIRE(run.history.size() == 20);
  MESSAGE("final val MAE " << run.history.back().val_mae);
  CHECK(run.history.back().val_mae < 0.05);
}
