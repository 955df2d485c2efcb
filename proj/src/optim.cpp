#include "celltide/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace celltide::optim {

namespace {

double safe_eval(const std::function<double(std::span<const double>)>& f, std::span<const double> x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
                             const NelderMeadOptions& options) {
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  const std::size_t n = x0.size();
  NelderMeadResult result;
  if (n == 0) {
    result.value = safe_eval(f, x0);
    result.x = std::move(x0);
    result.converged = true;
    return result;
  }

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = safe_eval(f, simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto point_along = [&](double coef, const std::vector<double>& worst, std::vector<double>& out) {
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + coef * (centroid[j] - worst[j]);
  };

  std::size_t it = 0;
  for (; it < options.max_iterations; ++it) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Stable sort keeps the earlier vertex on ties, so x0 wins initial ties.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];

    const double spread = values[worst] - values[best];
    if (std::isfinite(values[worst]) &&
        spread <= options.rel_tol * (std::abs(values[best]) + options.rel_tol)) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const auto& v = simplex[order[k]];
      for (std::size_t j = 0; j < n; ++j) centroid[j] += v[j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    point_along(kReflect, simplex[worst], trial);
    const double f_reflect = safe_eval(f, trial);
    if (f_reflect < values[best]) {
      point_along(kExpand, simplex[worst], trial2);
      const double f_expand = safe_eval(f, trial2);
      if (f_expand < f_reflect) {
        simplex[worst] = trial2;
        values[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < values[second_worst]) {
      simplex[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }
    const bool outside = f_reflect < values[worst];
    point_along(outside ? kContract : -kContract, simplex[worst], trial2);
    const double f_contract = safe_eval(f, trial2);
    if (f_contract < (outside ? f_reflect : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = f_contract;
      continue;
    }
    for (std::size_t k = 1; k <= n; ++k) {
      auto& v = simplex[order[k]];
      for (std::size_t j = 0; j < n; ++j) v[j] = simplex[best][j] + kShrink * (v[j] - simplex[best][j]);
      values[order[k]] = safe_eval(f, v);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  result.x = simplex[best];
  result.value = values[best];
  result.iterations = it;
  return result;
}

}  // namespace celltide::optim
