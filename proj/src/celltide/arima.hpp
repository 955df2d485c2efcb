#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace celltide::arima {

inline constexpr int kMaxOrder = 5;

struct Order {
  int p = 0;
  int d = 0;
  int q = 0;
  bool operator==(const Order&) const = default;
};

/// ARIMA(p, d, q) on the d-times differenced series w:
///   (w_t − mu) = Σ phi_i (w_{t−i} − mu) + e_t + Σ theta_j e_{t−j}
struct ArimaModel {
  Order order;
  std::vector<double> phi;
  std::vector<double> theta;
  double mu = 0.0;
  double sigma2 = 0.0;
  /// First value of the series at each differencing level 0..d−1.
  std::vector<double> heads;
  /// Number of residuals in the conditional sum of squares.
  std::size_t n_effective = 0;

  bool operator==(const ArimaModel&) const = default;
};

std::vector<double> difference(std::span<const double> series, int d);
std::vector<double> difference_heads(std::span<const double> series, int d);
std::vector<double> integrate(std::span<const double> diffed, std::span<const double> heads, int d);

/// Innovations with zero pre-sample residuals, computed on an already
/// mean-centred differenced series; e_t = 0 for t < p.
std::vector<double> css_residuals(std::span<const double> centred, std::span<const double> phi,
                                  std::span<const double> theta);
double conditional_sum_of_squares(std::span<const double> centred, std::span<const double> phi,
                                  std::span<const double> theta);

/// True when all roots of 1 − Σ a_k z^k lie outside the unit circle.
bool roots_outside_unit_circle(std::span<const double> a);

/// Hannan–Rissanen starting values (phi then theta) for a centred series.
std::vector<double> hannan_rissanen(std::span<const double> centred, int p, int q);

ArimaModel fit(std::span<const double> series, Order order);

double aic(const ArimaModel& model);
/// AIC with the log-likelihood term counted over `n` residuals. Comparing
/// candidates at a shared `n` keeps the ranking independent of the data's scale.
double aic(const ArimaModel& model, std::size_t n);

struct Candidate {
  Order order;
  double aic = 0.0;
};

/// Minimum AIC; ties prefer smaller p + q, then smaller d, then smaller p.
Order select_order(std::span<const Candidate> candidates);

/// Grid search p, q ∈ {0..3}, d ∈ {0, 1} by AIC; ties prefer fewer
/// parameters, then smaller d.
Order auto_order(std::span<const double> series);

/// One-step conditional expectation of the value following `history`.
double forecast_one(const ArimaModel& model, std::span<const double> history);

/// Forecasts series[begin, end) one step at a time, each from the true prefix.
std::vector<double> rolling_forecast(const ArimaModel& model, std::span<const double> series, std::size_t begin,
                                     std::size_t end);

std::string serialize(const ArimaModel& model);
ArimaModel deserialize(std::string_view text);

}  // namespace celltide::arima
