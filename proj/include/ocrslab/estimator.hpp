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

#include <functional>
#include <string>
#include <vector>

#include "ocrslab/errors.hpp"
#include "ocrslab/rng.hpp"
#include "ocrslab/stats.hpp"
#include "ocrslab/subset.hpp"

namespace ocrslab {

struct Estimate {
  double value = 0.0;
  double half_width = 0.0;  // 0 in exact mode
  int64_t samples = 0;      // 0 in exact mode
  bool exact = false;
};

/// Estimates E[g(R)] for R the random active set (element e present
/// independently with probability x_e). Exact mode enumerates the support;
/// Monte Carlo mode reports a Hoeffding half-width for [0, range]-valued g.
class ExpectationEstimator {
 public:
  enum class Mode { kExact, kMonteCarlo };

  struct Config {
    Mode mode = Mode::kExact;
    int64_t samples = 100000;
    double confidence_delta = 0.05;
    int max_escalations = 3;       // N grows 4x per escalation
    int exact_support_limit = 20;  // hard guard on exact enumeration
  };

  explicit ExpectationEstimator(Config config) : config_(config) {}
  const Config& config() const { return config_; }

  using SetFunction = std::function<double(const ElementSubset&)>;

  Estimate estimate(const std::vector<double>& x, const SetFunction& g,
                    double range, SubstreamRng& rng) const {
    if (config_.mode == Mode::kExact) return estimate_exact(x, g);
    return estimate_mc(x, g, range, rng, config_.samples);
  }

  /// Decides whether E[g(R)] > threshold. In Monte Carlo mode the decision is
  /// made only when the Hoeffding interval clears the threshold; otherwise the
  /// sample count escalates geometrically and, if still unresolved, an
  /// IndeterminateComparisonError is raised carrying the margin.
  struct Decision {
    bool exceeds = false;
    Estimate estimate;
  };

  Decision decide_exceeds(const std::vector<double>& x, const SetFunction& g,
                          double range, double threshold,
                          SubstreamRng& rng) const {
    if (config_.mode == Mode::kExact) {
      Estimate est = estimate_exact(x, g);
      return {est.value > threshold, est};
    }
    int64_t n = config_.samples;
    Estimate est;
    for (int attempt = 0; attempt <= config_.max_escalations; ++attempt) {
      est = estimate_mc(x, g, range, rng, n);
      if (est.value - est.half_width > threshold) return {true, est};
      if (est.value + est.half_width <= threshold) return {false, est};
      n *= 4;
    }
    throw IndeterminateComparisonError(
        "expectation statistically undecidable against threshold " +
            std::to_string(threshold),
        est.value, est.half_width, threshold);
  }

  Estimate estimate_exact(const std::vector<double>& x,
                          const SetFunction& g) const {
    std::vector<int> support;
    for (int e = 0; e < static_cast<int>(x.size()); ++e)
      if (x[e] > 0.0) support.push_back(e);
    if (static_cast<int>(support.size()) > config_.exact_support_limit)
      throw CapabilityError(
          "exact expectation: support exceeds enumeration guard (" +
          std::to_string(support.size()) + " > " +
          std::to_string(config_.exact_support_limit) + ")");
    int s = static_cast<int>(support.size());
    ElementSubset active(static_cast<int>(x.size()));
    double total = 0.0;
    for (uint64_t mask = 0; mask < (uint64_t{1} << s); ++mask) {
      active.clear();
      double p = 1.0;
      for (int i = 0; i < s; ++i) {
        if ((mask >> i) & 1) {
          active.insert(support[i]);
          p *= x[support[i]];
        } else {
          p *= 1.0 - x[support[i]];
        }
      }
      if (p > 0.0) total += p * g(active);
    }
    Estimate est;
    est.value = total;
    est.exact = true;
    return est;
  }

  Estimate estimate_mc(const std::vector<double>& x, const SetFunction& g,
                       double range, SubstreamRng& rng, int64_t samples) const {
    int n = static_cast<int>(x.size());
    ElementSubset active(n);
    double sum = 0.0;
    for (int64_t t = 0; t < samples; ++t) {
      active.clear();
      for (int e = 0; e < n; ++e)
        if (x[e] > 0.0 && rng.bernoulli(x[e])) active.insert(e);
      sum += g(active);
    }
    Estimate est;
    est.value = sum / samples;
    est.half_width =
        hoeffding_half_width(range, samples, config_.confidence_delta);
    est.samples = samples;
    return est;
  }

 private:
  Config config_;
};

}  // namespace ocrslab
