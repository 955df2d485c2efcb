#include "celltide/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "celltide/error.hpp"
#include "celltide/rng.hpp"

namespace celltide::dataset {

namespace {
// 2013-11-01 00:00 Europe/Rome, the first slot of the Milan record.
constexpr std::int64_t kSyntheticT0Ms = 1'383'260'400'000;
}  // namespace

ScalerParams fit_scaler(std::span<const double> train_values) {
  if (train_values.empty()) fail(ErrorCode::InvalidArgument, "fit_scaler: empty training slice");
  const auto [lo, hi] = std::minmax_element(train_values.begin(), train_values.end());
  if (!(*hi > *lo)) fail(ErrorCode::InvalidArgument, "fit_scaler: training slice is constant");
  return {*lo, *hi};
}

std::vector<double> transform(std::span<const double> values, const ScalerParams& scaler) {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [&](double x) { return scaler.transform(x); });
  return out;
}

std::vector<double> inverse(std::span<const double> values, const ScalerParams& scaler) {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [&](double z) { return scaler.inverse(z); });
  return out;
}

WindowSet windows_for_targets(std::span<const double> values, std::size_t window, std::size_t target_begin,
                              std::size_t target_end) {
  if (window == 0) fail(ErrorCode::InvalidArgument, "window length must be at least 1");
  if (target_begin < window) {
    fail(ErrorCode::InvalidArgument, "first target " + std::to_string(target_begin) + " has less than " +
                                         std::to_string(window) + " slots of history");
  }
  if (target_end > values.size() || target_end <= target_begin) {
    fail(ErrorCode::InvalidArgument, "series of length " + std::to_string(values.size()) +
                                         " too short for window " + std::to_string(window));
  }
  const std::size_t n = target_end - target_begin;
  WindowSet set{window, target_begin, linalg::Matrix(n, window), linalg::Vector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t target = target_begin + i;
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(target - window), window, set.inputs.row(i).begin());
    set.targets[i] = values[target];
  }
  return set;
}

WindowSet make_windows(std::span<const double> values, std::size_t window) {
  if (window == 0 || values.size() <= window) {
    fail(ErrorCode::InvalidArgument, "series of length " + std::to_string(values.size()) +
                                         " too short for window " + std::to_string(window));
  }
  return windows_for_targets(values, window, window, values.size());
}

SplitSpec split(std::size_t n_total, double train_frac) {
  if (!(train_frac > 0.0 && train_frac <= 0.8)) {
    fail(ErrorCode::InvalidArgument, "train fraction must be in (0, 0.8], got " + std::to_string(train_frac));
  }
  SplitSpec s;
  s.n_total = n_total;
  s.train_frac = train_frac;
  s.n_train = static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(n_total)));
  s.n_val = static_cast<std::size_t>(std::ceil(0.10 * static_cast<double>(n_total)));
  s.n_test = s.n_val;
  if (s.n_train == 0 || s.n_val == 0) {
    fail(ErrorCode::InvalidArgument, "series of " + std::to_string(n_total) + " samples is too short to split");
  }
  if (s.n_train + s.n_val + s.n_test > n_total) {
    fail(ErrorCode::InvalidArgument, "train fraction " + std::to_string(train_frac) +
                                         " overlaps the validation/test tail of " + std::to_string(n_total) +
                                         " samples");
  }
  return s;
}

cdr::ActivitySeries gen_synthetic(std::size_t days, std::uint64_t seed, std::size_t slots_per_day,
                                  const SyntheticShape& shape) {
  if (days == 0 || slots_per_day == 0) fail(ErrorCode::InvalidArgument, "gen_synthetic: days must be at least 1");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  Rng rng(seed);
  const std::size_t n = days * slots_per_day;
  const auto spd = static_cast<double>(slots_per_day);
  cdr::ActivitySeries series{1, cdr::Channel::Internet, kSyntheticT0Ms, std::vector<double>(n)};
  for (std::size_t t = 0; t < n; ++t) {
    const auto tt = static_cast<double>(t);
    const double daily = shape.daily_amplitude * std::max(0.0, std::sin(two_pi * tt / spd - shape.daily_phase));
    const double weekly = shape.weekly_amplitude * std::sin(two_pi * tt / (7.0 * spd));
    series.values[t] = std::max(0.0, shape.base + daily + weekly + shape.noise_sd * rng.normal());
  }
  return series;
}

}  // namespace celltide::dataset
