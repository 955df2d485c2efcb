#include "celltide/arima.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "celltide/error.hpp"
#include "celltide/format.hpp"
#include "celltide/optim.hpp"
#include "celltide/serialize.hpp"

namespace celltide::arima {

namespace {

std::string order_text(Order o) {
  return "(" + std::to_string(o.p) + "," + std::to_string(o.d) + "," + std::to_string(o.q) + ")";
}

void check_order(Order o) {
  for (int v : {o.p, o.d, o.q}) {
    if (v < 0 || v > kMaxOrder) {
      fail(ErrorCode::InvalidArgument, "ARIMA order " + order_text(o) + " outside 0.." + std::to_string(kMaxOrder));
    }
  }
}

// Least squares min |X b − y| by Householder QR. X is n × k, row-major.
std::vector<double> least_squares(std::vector<double> x, std::vector<double> y, std::size_t n, std::size_t k) {
  if (n < k) fail(ErrorCode::Fit, "least squares: fewer observations than unknowns");
  std::vector<double> diag(k);
  for (std::size_t j = 0; j < k; ++j) {
    double norm = 0.0;
    for (std::size_t i = j; i < n; ++i) norm += x[i * k + j] * x[i * k + j];
    norm = std::sqrt(norm);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(x[i * k + j]));
    if (norm <= 1e-12 * std::max(scale, 1.0)) fail(ErrorCode::Fit, "least squares: singular design matrix");
    const double alpha = x[j * k + j] > 0 ? -norm : norm;
    // v = x[j:, j] − alpha e1, stored in place
    x[j * k + j] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = j; i < n; ++i) vnorm2 += x[i * k + j] * x[i * k + j];
    for (std::size_t c = j + 1; c < k; ++c) {
      double dot = 0.0;
      for (std::size_t i = j; i < n; ++i) dot += x[i * k + j] * x[i * k + c];
      const double s = 2.0 * dot / vnorm2;
      for (std::size_t i = j; i < n; ++i) x[i * k + c] -= s * x[i * k + j];
    }
    double dot = 0.0;
    for (std::size_t i = j; i < n; ++i) dot += x[i * k + j] * y[i];
    const double s = 2.0 * dot / vnorm2;
    for (std::size_t i = j; i < n; ++i) y[i] -= s * x[i * k + j];
    diag[j] = alpha;
  }
  std::vector<double> b(k);
  for (std::size_t j = k; j-- > 0;) {
    double acc = y[j];
    for (std::size_t c = j + 1; c < k; ++c) acc -= x[j * k + c] * b[c];
    b[j] = acc / diag[j];
  }
  return b;
}

double mean(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::vector<double> difference(std::span<const double> series, int d) {
  if (d < 0) fail(ErrorCode::InvalidArgument, "difference: negative order");
  if (series.size() <= static_cast<std::size_t>(d)) {
    fail(ErrorCode::InvalidArgument, "difference: series of length " + std::to_string(series.size()) +
                                         " too short for d=" + std::to_string(d));
  }
  std::vector<double> out(series.begin(), series.end());
  for (int k = 0; k < d; ++k) {
    for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] = out[i + 1] - out[i];
    out.pop_back();
  }
  return out;
}

std::vector<double> difference_heads(std::span<const double> series, int d) {
  std::vector<double> heads;
  std::vector<double> level(series.begin(), series.end());
  for (int k = 0; k < d; ++k) {
    if (level.empty()) fail(ErrorCode::InvalidArgument, "difference_heads: series too short");
    heads.push_back(level.front());
    level = difference(level, 1);
  }
  return heads;
}

std::vector<double> integrate(std::span<const double> diffed, std::span<const double> heads, int d) {
  if (d < 0 || heads.size() != static_cast<std::size_t>(d)) {
    fail(ErrorCode::InvalidArgument, "integrate: need exactly d head values");
  }
  std::vector<double> level(diffed.begin(), diffed.end());
  for (int k = d; k-- > 0;) {
    std::vector<double> up(level.size() + 1);
    up[0] = heads[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < level.size(); ++i) up[i + 1] = up[i] + level[i];
    level = std::move(up);
  }
  return level;
}

std::vector<double> css_residuals(std::span<const double> centred, std::span<const double> phi,
                                  std::span<const double> theta) {
  const std::size_t p = phi.size();
  const std::size_t q = theta.size();
  std::vector<double> e(centred.size(), 0.0);
  for (std::size_t t = p; t < centred.size(); ++t) {
    double v = centred[t];
    for (std::size_t i = 0; i < p; ++i) v -= phi[i] * centred[t - 1 - i];
    for (std::size_t j = 0; j < q && j < t; ++j) v -= theta[j] * e[t - 1 - j];
    e[t] = v;
  }
  return e;
}

double conditional_sum_of_squares(std::span<const double> centred, std::span<const double> phi,
                                  std::span<const double> theta) {
  const auto e = css_residuals(centred, phi, theta);
  double css = 0.0;
  for (std::size_t t = phi.size(); t < e.size(); ++t) css += e[t] * e[t];
  return css;
}

bool roots_outside_unit_circle(std::span<const double> a) {
  // Step-down (reverse Levinson) recursion: every partial autocorrelation
  // must lie strictly inside (−1, 1).
  std::vector<double> cur(a.begin(), a.end());
  for (std::size_t k = cur.size(); k > 0; --k) {
    const double r = cur[k - 1];
    if (!std::isfinite(r) || std::abs(r) >= 1.0) return false;
    const double denom = 1.0 - r * r;
    std::vector<double> next(k - 1);
    for (std::size_t j = 0; j + 1 < k; ++j) next[j] = (cur[j] + r * cur[k - 2 - j]) / denom;
    cur = std::move(next);
  }
  return true;
}

std::vector<double> hannan_rissanen(std::span<const double> centred, int p, int q) {
  const std::size_t n = centred.size();
  const auto up = static_cast<std::size_t>(p);
  const auto uq = static_cast<std::size_t>(q);
  if (p + q == 0) return {};

  std::vector<double> resid(n, 0.0);
  std::size_t start = up;
  if (q > 0) {
    const std::size_t m = std::max<std::size_t>({std::min<std::size_t>(20, n / 10), up + uq, 1});
    if (n <= 2 * m) fail(ErrorCode::Fit, "series too short for the long autoregression");
    std::vector<double> x((n - m) * m), y(n - m);
    for (std::size_t t = m; t < n; ++t) {
      for (std::size_t i = 0; i < m; ++i) x[(t - m) * m + i] = centred[t - 1 - i];
      y[t - m] = centred[t];
    }
    const auto a = least_squares(std::move(x), std::move(y), n - m, m);
    for (std::size_t t = m; t < n; ++t) {
      double v = centred[t];
      for (std::size_t i = 0; i < m; ++i) v -= a[i] * centred[t - 1 - i];
      resid[t] = v;
    }
    start = std::max(up, m + uq);
  }

  const std::size_t k = up + uq;
  const std::size_t rows = n - start;
  std::vector<double> x(rows * k), y(rows);
  for (std::size_t t = start; t < n; ++t) {
    const std::size_t r = t - start;
    for (std::size_t i = 0; i < up; ++i) x[r * k + i] = centred[t - 1 - i];
    for (std::size_t j = 0; j < uq; ++j) x[r * k + up + j] = resid[t - 1 - j];
    y[r] = centred[t];
  }
  return least_squares(std::move(x), std::move(y), rows, k);
}

ArimaModel fit(std::span<const double> series, Order order) {
  check_order(order);
  const auto needed = static_cast<std::size_t>(10 * (order.p + order.q + 1) + order.d);
  if (series.size() < needed) {
    fail(ErrorCode::InvalidArgument, "ARIMA" + order_text(order) + " needs at least " + std::to_string(needed) +
                                         " observations, got " + std::to_string(series.size()));
  }
  ArimaModel model;
  model.order = order;
  model.heads = difference_heads(series, order.d);
  std::vector<double> centred = difference(series, order.d);
  model.mu = mean(centred);
  for (double& v : centred) v -= model.mu;

  const auto p = static_cast<std::size_t>(order.p);
  std::vector<double> start = hannan_rissanen(centred, order.p, order.q);
  const auto objective = [&](std::span<const double> params) {
    return conditional_sum_of_squares(centred, params.first(p), params.subspan(p));
  };
  const auto best = optim::nelder_mead(objective, start);
  if (!std::isfinite(best.value)) fail(ErrorCode::Fit, "ARIMA" + order_text(order) + ": CSS diverged");

  model.phi.assign(best.x.begin(), best.x.begin() + static_cast<std::ptrdiff_t>(p));
  model.theta.assign(best.x.begin() + static_cast<std::ptrdiff_t>(p), best.x.end());
  if (!roots_outside_unit_circle(model.phi)) {
    fail(ErrorCode::Fit, "ARIMA" + order_text(order) +
                             ": fitted AR part is not stationary; try a larger d or different p");
  }
  std::vector<double> neg_theta(model.theta.size());
  std::transform(model.theta.begin(), model.theta.end(), neg_theta.begin(), [](double t) { return -t; });
  if (!roots_outside_unit_circle(neg_theta)) {
    fail(ErrorCode::Fit, "ARIMA" + order_text(order) + ": fitted MA part is not invertible; try a different q");
  }
  model.n_effective = centred.size() - p;
  model.sigma2 = best.value / static_cast<double>(model.n_effective);
  return model;
}

double aic(const ArimaModel& model) { return aic(model, model.n_effective); }

double aic(const ArimaModel& model, std::size_t n) {
  return static_cast<double>(n) * std::log(model.sigma2) + 2.0 * (model.order.p + model.order.q + 1);
}

Order select_order(std::span<const Candidate> candidates) {
  if (candidates.empty()) fail(ErrorCode::Fit, "no candidate orders");
  const auto key = [](const Candidate& c) { return std::tuple{c.aic, c.order.p + c.order.q, c.order.d, c.order.p}; };
  return std::min_element(candidates.begin(), candidates.end(),
                          [&](const Candidate& a, const Candidate& b) { return key(a) < key(b); })
      ->order;
}

Order auto_order(std::span<const double> series) {
  if (series.size() < 200) {
    fail(ErrorCode::InvalidArgument, "auto order selection needs at least 200 observations, got " +
                                         std::to_string(series.size()));
  }
  std::vector<ArimaModel> fitted;
  std::string last_error;
  for (int d = 0; d <= 1; ++d) {
    for (int p = 0; p <= 3; ++p) {
      for (int q = 0; q <= 3; ++q) {
        try {
          fitted.push_back(fit(series, {p, d, q}));
        } catch (const Error& e) {
          last_error = e.what();
        }
      }
    }
  }
  if (fitted.empty()) fail(ErrorCode::Fit, "no ARIMA order could be fitted: " + last_error);
  std::size_t n = fitted.front().n_effective;
  for (const auto& m : fitted) n = std::min(n, m.n_effective);
  std::vector<Candidate> candidates;
  for (const auto& m : fitted) candidates.push_back({m.order, aic(m, n)});
  return select_order(candidates);
}

double forecast_one(const ArimaModel& model, std::span<const double> history) {
  const auto p = static_cast<std::size_t>(model.order.p);
  const auto d = static_cast<std::size_t>(model.order.d);
  if (history.size() < p + d || (d > 0 && history.size() <= d)) {
    fail(ErrorCode::InvalidArgument, "forecast needs at least " + std::to_string(std::max(p + d, d + 1)) +
                                         " past values, got " + std::to_string(history.size()));
  }
  std::vector<double> centred = d > 0 ? difference(history, model.order.d)
                                      : std::vector<double>(history.begin(), history.end());
  for (double& v : centred) v -= model.mu;
  const auto e = css_residuals(centred, model.phi, model.theta);
  const std::size_t n = centred.size();

  double next = model.mu;
  for (std::size_t i = 0; i < p; ++i) next += model.phi[i] * centred[n - 1 - i];
  for (std::size_t j = 0; j < model.theta.size() && j < n; ++j) next += model.theta[j] * e[n - 1 - j];

  // y_{n+1} = w_{n+1} + Σ_k (−1)^{k+1} C(d,k) y_{n+1−k}
  const std::size_t len = history.size();
  for (int k = 1; k <= model.order.d; ++k) {
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    next += sign * binomial(model.order.d, k) * history[len - static_cast<std::size_t>(k)];
  }
  return next;
}

std::vector<double> rolling_forecast(const ArimaModel& model, std::span<const double> series, std::size_t begin,
                                     std::size_t end) {
  if (begin > end || end > series.size()) {
    fail(ErrorCode::InvalidArgument, "forecast range [" + std::to_string(begin) + ", " + std::to_string(end) +
                                         ") outside series of length " + std::to_string(series.size()));
  }
  std::vector<double> out;
  out.reserve(end - begin);
  for (std::size_t t = begin; t < end; ++t) out.push_back(forecast_one(model, series.first(t)));
  return out;
}

std::string serialize(const ArimaModel& model) {
  nlohmann::json doc;
  doc["type"] = "arima";
  doc["p"] = model.order.p;
  doc["d"] = model.order.d;
  doc["q"] = model.order.q;
  doc["phi"] = model.phi;
  doc["theta"] = model.theta;
  doc["mu"] = model.mu;
  doc["sigma2"] = model.sigma2;
  doc["heads"] = model.heads;
  doc["n_effective"] = model.n_effective;
  return dump_json(doc);
}

ArimaModel deserialize(std::string_view text) {
  const nlohmann::json doc = parse_model_json(text, "arima");
  ArimaModel m;
  m.order = {static_cast<int>(require_int(doc, "p")), static_cast<int>(require_int(doc, "d")),
             static_cast<int>(require_int(doc, "q"))};
  check_order(m.order);
  m.phi = require_array(doc, "", "phi");
  m.theta = require_array(doc, "", "theta");
  m.heads = require_array(doc, "", "heads");
  if (m.phi.size() != static_cast<std::size_t>(m.order.p)) fail(ErrorCode::Parse, "phi: length must equal p");
  if (m.theta.size() != static_cast<std::size_t>(m.order.q)) fail(ErrorCode::Parse, "theta: length must equal q");
  if (m.heads.size() != static_cast<std::size_t>(m.order.d)) fail(ErrorCode::Parse, "heads: length must equal d");
  m.mu = require_number(doc, "mu");
  m.sigma2 = require_number(doc, "sigma2");
  if (!(m.sigma2 >= 0.0)) fail(ErrorCode::Parse, "sigma2: must be nonnegative");
  if (doc.contains("n_effective")) m.n_effective = static_cast<std::size_t>(require_int(doc, "n_effective"));
  return m;
}

}  // namespace celltide::arima
