#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "celltide/cdr.hpp"
#include "celltide/linalg.hpp"

namespace celltide::dataset {

/// Min-max scaling fitted on the training slice only.
struct ScalerParams {
  double min = 0.0;
  double max = 1.0;

  double transform(double x) const noexcept { return (x - min) / (max - min); }
  double inverse(double z) const noexcept { return min + z * (max - min); }
  bool operator==(const ScalerParams&) const = default;
};

ScalerParams fit_scaler(std::span<const double> train_values);
/// Affine, unclipped: values beyond the fitted range map outside [0, 1].
std::vector<double> transform(std::span<const double> values, const ScalerParams& scaler);
std::vector<double> inverse(std::span<const double> values, const ScalerParams& scaler);

/// Row i of `inputs` is series[first_target + i - T, first_target + i); the
/// matching target is series[first_target + i].
struct WindowSet {
  std::size_t window = 0;
  std::size_t first_target = 0;
  linalg::Matrix inputs;
  linalg::Vector targets;

  std::size_t size() const noexcept { return targets.size(); }
  std::span<const double> input(std::size_t i) const { return inputs.row(i); }
};

WindowSet make_windows(std::span<const double> values, std::size_t window);

/// Windows whose targets fall in [target_begin, target_end). History before
/// target_begin is used as input, so target_begin must be at least `window`.
WindowSet windows_for_targets(std::span<const double> values, std::size_t window, std::size_t target_begin,
                              std::size_t target_end);

/// Chronological split: training head, then validation and test as the last
/// two blocks of the series.
struct SplitSpec {
  std::size_t n_total = 0;
  double train_frac = 0.0;
  std::size_t n_train = 0;
  std::size_t n_val = 0;
  std::size_t n_test = 0;

  std::size_t train_end() const noexcept { return n_train; }
  std::size_t val_begin() const noexcept { return n_total - n_test - n_val; }
  std::size_t test_begin() const noexcept { return n_total - n_test; }
};

SplitSpec split(std::size_t n_total, double train_frac);

struct SyntheticShape {
  double base = 40.0;
  double daily_amplitude = 100.0;
  double daily_phase = 0.6;
  double weekly_amplitude = 10.0;
  double noise_sd = 3.0;
};

/// Diurnal traffic-like series: base + amp·max(0, sin(2πt/spd − phase)) plus a
/// weekly sinusoid and Gaussian noise, floored at zero.
cdr::ActivitySeries gen_synthetic(std::size_t days, std::uint64_t seed, std::size_t slots_per_day = cdr::kSlotsPerDay,
                                  const SyntheticShape& shape = {});

}  // namespace celltide::dataset
