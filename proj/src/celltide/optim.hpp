#pragma once

#include <functional>
#include <span>
#include <vector>

namespace celltide::optim {

struct NelderMeadOptions {
  double initial_step = 0.1;
  /// Stop when (f_worst − f_best) ≤ rel_tol · (|f_best| + rel_tol).
  double rel_tol = 1e-8;
  std::size_t max_iterations = 2000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Derivative-free simplex minimization. The starting point is a vertex of the
/// initial simplex and the best vertex never worsens, so the returned value is
/// at most f(x0).
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
                             const NelderMeadOptions& options = {});

}  // namespace celltide::optim
