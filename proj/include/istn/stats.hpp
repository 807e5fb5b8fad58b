// SPDX-License-Identifier: Apache-2.0
//
// Student-t confidence intervals and trailing moving averages for the
// across-seed reward bands.

#pragma once

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace istn {

struct Interval {
  double lower = 0.0;
  double mean = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Two-sided mean +- t_{(1+level)/2, n-1} * s / sqrt(n).
inline Interval confidence_interval(std::span<const double> samples, double level = 0.90) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("confidence_interval: need at least 2 samples");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("confidence_interval: level must lie in (0, 1)");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) return {mean, mean, mean};
  const boost::math::students_t dist(static_cast<double>(n - 1));
  const double t = boost::math::quantile(dist, 0.5 + 0.5 * level);
  const double half = t * sd / std::sqrt(static_cast<double>(n));
  return {mean - half, mean, mean + half};
}

/// Trailing mean over up to `window` points ending at each index.
inline std::vector<double> moving_average(std::span<const double> xs, std::size_t window) {
  if (window == 0) throw std::invalid_argument("moving_average: window must be >= 1");
  std::vector<double> out(xs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sum += xs[i];
    if (i >= window) sum -= xs[i - window];
    out[i] = sum / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

inline double mean_of(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace istn
