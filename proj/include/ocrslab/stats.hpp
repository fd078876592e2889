// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "ocrslab/errors.hpp"

namespace ocrslab {

inline constexpr double kZ95 = 1.959963984540054;  // two-sided 95% normal

/// Wilson score interval for a binomial proportion.
struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
  double center() const { return (lo + hi) / 2; }
  double half_width() const { return (hi - lo) / 2; }
};

inline WilsonInterval wilson_interval(int64_t successes, int64_t trials,
                                      double z = kZ95) {
  if (trials <= 0) throw InputError("wilson_interval: trials must be positive");
  double n = static_cast<double>(trials);
  double phat = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (phat + z2 / (2 * n)) / denom;
  double rad =
      z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / denom;
  return {std::max(0.0, center - rad), std::min(1.0, center + rad)};
}

/// Hoeffding half-width for the mean of N samples of a [0, range]-valued
/// variable at confidence 1-delta.
inline double hoeffding_half_width(double range, int64_t n, double delta) {
  if (n <= 0 || delta <= 0 || delta >= 1 || range < 0)
    throw InputError("hoeffding_half_width: bad parameters");
  return range * std::sqrt(std::log(2.0 / delta) / (2.0 * n));
}

/// Streaming mean/variance accumulator. Merge is exact over disjoint chunks
/// when applied in a fixed order.
struct RunningMean {
  int64_t n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double v) {
    ++n;
    sum += v;
    sum_sq += v * v;
  }
  void merge(const RunningMean& other) {
    n += other.n;
    sum += other.sum;
    sum_sq += other.sum_sq;
  }
  double mean() const { return n > 0 ? sum / n : 0.0; }
  double variance() const {
    if (n < 2) return 0.0;
    double m = mean();
    double v = (sum_sq - n * m * m) / (n - 1);
    return v > 0 ? v : 0.0;
  }
  double stderr_mean() const {
    return n > 0 ? std::sqrt(variance() / n) : 0.0;
  }
  double ci95_half_width() const { return kZ95 * stderr_mean(); }
};

/// 95% CI for a ratio of two independently estimated means, via the delta
/// method. Conservative: combines relative errors in quadrature.
struct RatioEstimate {
  double numerator = 0.0;
  double numerator_ci = 0.0;
  double denominator = 0.0;
  double denominator_ci = 0.0;

  double ratio() const { return numerator / denominator; }
  double ci_half_width() const {
    double rel_n = numerator != 0 ? numerator_ci / std::fabs(numerator) : 0;
    double rel_d =
        denominator != 0 ? denominator_ci / std::fabs(denominator) : 0;
    return std::fabs(ratio()) * std::sqrt(rel_n * rel_n + rel_d * rel_d);
  }
};

/// log of the binomial pmf, via lgamma.
inline double binomial_log_pmf(int64_t n, int64_t k, double p) {
  if (k < 0 || k > n) return -INFINITY;
  if (p <= 0.0) return k == 0 ? 0.0 : -INFINITY;
  if (p >= 1.0) return k == n ? 0.0 : -INFINITY;
  double lgn = std::lgamma(static_cast<double>(n) + 1) -
               std::lgamma(static_cast<double>(k) + 1) -
               std::lgamma(static_cast<double>(n - k) + 1);
  return lgn + k * std::log(p) + (n - k) * std::log1p(-p);
}

/// Pr[Bin(n, p) >= k], summed over the smaller tail for accuracy.
inline double binomial_upper_tail(int64_t n, int64_t k, double p) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  double mean = n * p;
  if (k > mean) {
    double acc = 0.0;
    for (int64_t i = k; i <= n; ++i) acc += std::exp(binomial_log_pmf(n, i, p));
    return std::min(1.0, acc);
  }
  double acc = 0.0;
  for (int64_t i = 0; i < k; ++i) acc += std::exp(binomial_log_pmf(n, i, p));
  return std::max(0.0, 1.0 - acc);
}

/// Pr[Bin(n, p) <= k].
inline double binomial_lower_tail(int64_t n, int64_t k, double p) {
  return 1.0 - binomial_upper_tail(n, k + 1, p);
}

}  // namespace ocrslab
