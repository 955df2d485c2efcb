#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "celltide/arima.hpp"
#include "celltide/error.hpp"
#include "celltide/rng.hpp"
#include "simulate.hpp"

using namespace celltide;
using namespace celltide::arima;

namespace {

ArimaModel manual(Order order, std::vector<double> phi, std::vector<double> theta, double mu) {
  ArimaModel m;
  m.order = order;
  m.phi = std::move(phi);
  m.theta = std::move(theta);
  m.mu = mu;
  return m;
}

}  // namespace

TEST_CASE("difference and integrate") {
  CHECK(difference(std::vector<double>{1, 2, 4}, 1) == std::vector<double>{1, 2});
  CHECK(difference(std::vector<double>{1, 2, 4}, 0) == std::vector<double>{1, 2, 4});
  CHECK(difference(std::vector<double>{1, 4, 9, 16}, 2) == std::vector<double>{2, 2});
  const auto ramp_diff = difference(std::vector<double>{3, 5, 7, 9, 11}, 1);
  CHECK(ramp_diff == std::vector<double>(4, 2.0));
  CHECK_THROWS_AS(difference(std::vector<double>{1, 2}, 2), Error);
}

TEST_CASE("integrate inverts difference") {
  Rng rng(14);
  for (int d = 0; d <= 3; ++d) {
    std::vector<double> ints(40), reals(40);
    for (std::size_t i = 0; i < 40; ++i) {
      ints[i] = static_cast<double>(static_cast<int>(rng.below(2000)) - 1000);
      reals[i] = rng.uniform(-50, 50);
    }
    CHECK(integrate(difference(ints, d), difference_heads(ints, d), d) == ints);
    const auto back = integrate(difference(reals, d), difference_heads(reals, d), d);
    for (std::size_t i = 0; i < 40; ++i) CHECK(std::abs(back[i] - reals[i]) <= 1e-9);
  }
  CHECK_THROWS_AS(integrate(std::vector<double>{1.0}, std::vector<double>{}, 1), Error);
}

TEST_CASE("stationarity check") {
  CHECK(roots_outside_unit_circle(std::vector<double>{}));
  CHECK(roots_outside_unit_circle(std::vector<double>{0.5}));
  CHECK(roots_outside_unit_circle(std::vector<double>{-0.99}));
  CHECK_FALSE(roots_outside_unit_circle(std::vector<double>{1.0}));
  CHECK_FALSE(roots_outside_unit_circle(std::vector<double>{1.05}));
  CHECK(roots_outside_unit_circle(std::vector<double>{0.5, 0.3}));
  CHECK_FALSE(roots_outside_unit_circle(std::vector<double>{0.5, 0.6}));   // φ1 + φ2 > 1
  CHECK_FALSE(roots_outside_unit_circle(std::vector<double>{-0.8, 0.3}));  // φ2 − φ1 > 1
  CHECK(roots_outside_unit_circle(std::vector<double>{1.2, -0.5}));        // complex roots, |z|² = 2
}

TEST_CASE("AR(1) coefficient recovery over 100 seeds") {
  int inside = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto x = simulate::arma(2000, {0.8}, {}, 1.0, seed);
    const auto m = fit(x, {1, 0, 0});
    if (m.phi[0] >= 0.75 && m.phi[0] <= 0.85) ++inside;
  }
  MESSAGE(inside << "/100 estimates inside [0.75, 0.85]");
  CHECK(inside >= 95);
}

TEST_CASE("white noise gives a near-zero AR coefficient") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto x = simulate::arma(2000, {}, {}, 2.0, seed, 5.0);
    const auto m = fit(x, {1, 0, 0});
    CHECK(std::abs(m.phi[0]) < 0.1);
    CHECK(m.mu == doctest::Approx(5.0).epsilon(0.05));
    CHECK(m.sigma2 == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("ARMA(1,1) recovery") {
  const auto x = simulate::arma(4000, {0.6}, {0.4}, 1.0, 3);
  const auto m = fit(x, {1, 0, 1});
  CHECK(m.phi[0] == doctest::Approx(0.6).epsilon(0.1));
  CHECK(m.theta[0] == doctest::Approx(0.4).epsilon(0.15));
}

TEST_CASE("differenced ramp: mu equals the slope") {
  Rng rng(2);
  std::vector<double> ramp(500);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 10.0 + 2.5 * static_cast<double>(i) + 1e-6 * rng.normal();
  const auto m = fit(ramp, {0, 1, 0});
  CHECK(m.mu == doctest::Approx(2.5).epsilon(1e-6));
  CHECK(m.heads == std::vector<double>{ramp[0]});
}

TEST_CASE("refinement never worsens the Hannan-Rissanen start") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto x = simulate::arma(800, {0.5, -0.2}, {0.3}, 1.0, seed, 2.0);
    const auto m = fit(x, {2, 0, 1});
    std::vector<double> centred = x;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    for (double& v : centred) v -= mean;
    const auto start = hannan_rissanen(centred, 2, 1);
    const double css_start =
        conditional_sum_of_squares(centred, std::span(start).first(2), std::span(start).subspan(2));
    const double css_fit = conditional_sum_of_squares(centred, m.phi, m.theta);
    CHECK(css_fit <= css_start);
  }
}

TEST_CASE("fit errors") {
  CHECK_THROWS_AS(fit(std::vector<double>(15, 1.0), {1, 0, 0}), Error);
  CHECK_THROWS_AS(fit(std::vector<double>(500, 1.0), {6, 0, 0}), Error);

  // Explosive data: the CSS optimum lies outside the stationary region.
  Rng rng(1);
  std::vector<double> x(200);
  x[0] = 1.0;
  for (std::size_t t = 1; t < x.size(); ++t) x[t] = 1.05 * x[t - 1] + rng.normal();
  try {
    fit(x, {1, 0, 0});
    FAIL("expected a fit error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Fit);
  }
}

TEST_CASE("forecast_one closed forms") {
  const std::vector<double> history = {3.0, 7.0, -2.0, 5.5};
  CHECK(forecast_one(manual({0, 0, 0}, {}, {}, 4.25), history) == 4.25);
  CHECK(forecast_one(manual({0, 0, 0}, {}, {}, 4.25), std::vector<double>{}) == 4.25);
  CHECK(forecast_one(manual({1, 0, 0}, {1.0}, {}, 0.0), history) == 5.5);
  CHECK(forecast_one(manual({0, 1, 0}, {}, {}, 0.0), history) == 5.5);
  CHECK(forecast_one(manual({0, 1, 0}, {}, {}, 0.5), history) == 6.0);
  // d = 2 with zero mean extrapolates linearly.
  CHECK(forecast_one(manual({0, 2, 0}, {}, {}, 0.0), std::vector<double>{1, 2, 3}) == 4.0);
  CHECK_THROWS_AS(forecast_one(manual({2, 1, 0}, {0.1, 0.1}, {}, 0.0), std::vector<double>{1, 2}), Error);
}

TEST_CASE("forecast_one uses recursively computed MA residuals") {
  // MA(1), theta = 0.5, mu = 0: e_0 = x_0, e_1 = x_1 − 0.5 e_0, forecast = 0.5 e_1.
  const std::vector<double> history = {2.0, 1.0};
  CHECK(forecast_one(manual({0, 0, 1}, {}, {0.5}, 0.0), history) == doctest::Approx(0.5 * (1.0 - 0.5 * 2.0)));
}

TEST_CASE("rolling forecasts") {
  const auto x = simulate::arma(3000, {0.8}, {}, 1.0, 17);
  const auto mean_model = manual({0, 0, 0}, {}, {}, 1.5);
  const auto flat = rolling_forecast(mean_model, x, 2000, 2500);
  CHECK(flat.size() == 500);
  CHECK(std::all_of(flat.begin(), flat.end(), [](double v) { return v == 1.5; }));
  CHECK_THROWS_AS(rolling_forecast(mean_model, x, 2000, 3001), Error);

  const auto m = fit(std::span(x).first(2000), {1, 0, 0});
  const auto pred = rolling_forecast(m, x, 2000, 3000);
  double mae = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) mae += std::abs(pred[i] - x[2000 + i]);
  mae /= static_cast<double>(pred.size());
  const double theory = std::sqrt(2.0 / std::numbers::pi);
  CHECK(std::abs(mae - theory) <= 0.1 * theory);
}

TEST_CASE("rolling forecasts are causal") {
  const auto x = simulate::arma(600, {0.5}, {0.3}, 1.0, 5);
  const auto m = fit(std::span(x).first(400), {1, 0, 1});
  const auto clean = rolling_forecast(m, x, 400, 500);
  auto poisoned = x;
  for (std::size_t t = 450; t < poisoned.size(); ++t) poisoned[t] = 1e6;
  const auto dirty = rolling_forecast(m, poisoned, 400, 500);
  for (std::size_t i = 0; i < 50; ++i) CHECK(dirty[i] == clean[i]);
}

TEST_CASE("mean model is translation equivariant") {
  const auto x = simulate::arma(300, {}, {}, 1.0, 9, 3.0);
  auto shifted = x;
  for (double& v : shifted) v += 100.0;
  const auto a = fit(x, {0, 0, 0});
  const auto b = fit(shifted, {0, 0, 0});
  const auto fa = rolling_forecast(a, x, 200, 300);
  const auto fb = rolling_forecast(b, shifted, 200, 300);
  for (std::size_t i = 0; i < fa.size(); ++i) CHECK(fb[i] == doctest::Approx(fa[i] + 100.0).epsilon(1e-12));
}

TEST_CASE("select_order tie-break") {
  const std::vector<Candidate> tied = {{{2, 0, 1}, 10.0}, {{1, 1, 0}, 10.0}, {{0, 0, 1}, 10.0}, {{1, 0, 0}, 10.0}};
  CHECK(select_order(tied) == Order{0, 0, 1});
  const std::vector<Candidate> d_tie = {{{1, 1, 0}, 5.0}, {{1, 0, 0}, 5.0}};
  CHECK(select_order(d_tie) == Order{1, 0, 0});
  const std::vector<Candidate> clear = {{{0, 0, 0}, 5.0}, {{3, 1, 3}, 4.0}};
  CHECK(select_order(clear) == Order{3, 1, 3});
}

TEST_CASE("auto_order on simulated data") {
  int ar_exact = 0;
  int noise_small = 0;
  const int seeds = 10;
  for (int seed = 1; seed <= seeds; ++seed) {
    const auto ar_series = simulate::arma(1000, {0.8}, {}, 1.0, static_cast<std::uint64_t>(seed));
    const auto ar = auto_order(ar_series);
    CHECK(ar.p >= 1);
    CHECK(ar.d == 0);
    const std::size_t common = ar_series.size() - 4;  // smallest residual count in the grid, (3,1,q)
    CHECK(aic(fit(ar_series, ar), common) <= aic(fit(ar_series, {1, 0, 0}), common));
    if (ar == Order{1, 0, 0}) ++ar_exact;

    const auto wn = auto_order(simulate::arma(1000, {}, {}, 1.0, 100 + static_cast<std::uint64_t>(seed)));
    CHECK(wn.d == 0);
    if (wn.p + wn.q <= 1) ++noise_small;
  }
  // AIC tolerates near-cancelling ARMA roots, so exact recovery is not guaranteed per seed.
  MESSAGE("AR(1) exact " << ar_exact << "/" << seeds << ", white noise p+q<=1 " << noise_small << "/" << seeds);
  CHECK(noise_small > seeds / 2);
  CHECK_THROWS_AS(auto_order(std::vector<double>(150, 1.0)), Error);
}

TEST_CASE("auto_order does not depend on the scale of the data") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    auto x = simulate::arma(600, {0.6, -0.2}, {0.3}, 1.0, seed, 5.0);
    const Order base = auto_order(x);
    for (double& v : x) v *= 1000.0;
    CHECK(auto_order(x) == base);
    for (double& v : x) v *= 1e-6;
    CHECK(auto_order(x) == base);
  }
}

TEST_CASE("serialization round trip") {
  const auto x = simulate::arma(600, {0.4}, {0.2}, 1.0, 4, 10.0);
  const auto m = fit(x, {1, 1, 1});
  const auto back = deserialize(serialize(m));
  CHECK(back == m);
  const auto doc = nlohmann::json::parse(serialize(m));
  CHECK(doc["type"] == "arima");
  CHECK(doc["heads"].size() == 1);
  auto bad = doc;
  bad["phi"] = std::vector<double>{0.1, 0.2};
  CHECK_THROWS_WITH_AS(deserialize(bad.dump()), doctest::Contains("phi"), Error);
}
