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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ocrslab/errors.hpp"
#include "ocrslab/matroid.hpp"

namespace ocrslab {

struct WeightedFeasibleSet {
  ElementSubset set;
  double weight = 0.0;
};

/// Per-element activation probabilities x with a scale factor b and a
/// convex-combination certificate: x = b * sum_i weight_i * 1_{F_i}, where
/// each F_i is independent in the target matroid and the weights sum to 1.
struct MarginalVector {
  std::vector<double> x;
  double scale_b = 1.0;
  std::vector<WeightedFeasibleSet> certificate;

  int size() const { return static_cast<int>(x.size()); }

  /// Builds x from b and a certificate.
  static MarginalVector from_certificate(
      int n, double b, std::vector<WeightedFeasibleSet> cert) {
    MarginalVector mv;
    mv.scale_b = b;
    mv.x.assign(n, 0.0);
    for (const auto& ws : cert) {
      ws.set.for_each([&](int e) { mv.x[e] += b * ws.weight; });
    }
    mv.certificate = std::move(cert);
    return mv;
  }

  /// Checks all invariants against the target matroid. Throws InputError on
  /// violation.
  void validate(const Matroid& m, double tol = 1e-12) const {
    if (size() != m.size())
      throw InputError("MarginalVector: dimension does not match ground set");
    if (!(scale_b > 0.0 && scale_b <= 1.0))
      throw InputError("MarginalVector: scale b must be in (0,1]");
    double wsum = 0.0;
    std::vector<double> recon(x.size(), 0.0);
    for (const auto& ws : certificate) {
      if (ws.weight < -tol)
        throw InputError("MarginalVector: negative certificate weight");
      if (!m.independent(ws.set))
        throw InputError("MarginalVector: certificate set not independent");
      wsum += ws.weight;
      ws.set.for_each([&](int e) { recon[e] += scale_b * ws.weight; });
    }
    if (std::fabs(wsum - 1.0) > 1e-9)
      throw InputError("MarginalVector: certificate weights do not sum to 1");
    for (int e = 0; e < size(); ++e) {
      if (x[e] < -tol || x[e] > scale_b + 1e-9)
        throw InputError("MarginalVector: x out of [0, b]");
      if (std::fabs(recon[e] - x[e]) > 1e-9)
        throw InputError("MarginalVector: certificate does not reproduce x");
    }
  }

  /// Multiplies b and every x_e by `factor`. The certificate is unchanged.
  MarginalVector shrunk(double factor) const {
    if (!(factor > 0.0 && factor <= 1.0))
      throw InputError("MarginalVector::shrunk: factor must be in (0,1]");
    MarginalVector out = *this;
    out.scale_b *= factor;
    for (double& v : out.x) v *= factor;
    return out;
  }

  /// Zeroes entries outside `domain`. Certificate sets are intersected with
  /// the domain; independence is preserved under restriction.
  MarginalVector restricted(const ElementSubset& domain) const {
    MarginalVector out = *this;
    for (int e = 0; e < size(); ++e)
      if (!domain.contains(e)) out.x[e] = 0.0;
    for (auto& ws : out.certificate) ws.set &= domain;
    return out;
  }
};

struct PolytopeCertification {
  MarginalVector marginal;
  double applied_scale = 1.0;  // uniform scale applied to reach the polytope
  double residual = 0.0;       // leftover mass after decomposition
};

/// Decomposes target marginals (clipped to [0,1]) into a convex combination
/// of independent sets of `m` by iterative greedy on residuals. If the
/// residual exceeds 1e-6*|E|, the target is uniformly scaled down and
/// decomposition retried; the applied scale is reported.
inline PolytopeCertification certify_in_polytope(const Matroid& m,
                                                 std::vector<double> target,
                                                 double scale_b = 1.0) {
  if (static_cast<int>(target.size()) != m.size())
    throw InputError("certify_in_polytope: dimension mismatch");
  for (double& v : target) v = std::clamp(v, 0.0, 1.0);
  const double kEps = 1e-12;
  const double kResidualTol = 1e-6 * std::max(1, m.size());
  const int kMaxScaleDowns = 200;

  double applied = 1.0;
  for (int attempt = 0; attempt <= kMaxScaleDowns; ++attempt) {
    std::vector<double> r = target;
    if (applied != 1.0)
      for (double& v : r) v *= applied;
    std::vector<WeightedFeasibleSet> cert;
    double total_w = 0.0;
    while (total_w < 1.0 - kEps) {
      // Greedy independent set over positive residuals, largest first.
      std::vector<int> order(m.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return r[a] > r[b]; });
      ElementSubset f(m.size());
      int rank_f = 0;
      double min_res = 1.0 - total_w;
      for (int e : order) {
        if (r[e] <= kEps) break;
        if (m.rank_with(f, e) > rank_f) {
          f.insert(e);
          ++rank_f;
          min_res = std::min(min_res, r[e]);
        }
      }
      if (f.empty()) break;  // residual exhausted
      double w = min_res;
      f.for_each([&](int e) { r[e] -= w; });
      cert.push_back({f, w});
      total_w += w;
    }
    double residual = 0.0;
    for (double v : r) residual += std::max(0.0, v);
    if (residual <= kResidualTol) {
      if (total_w < 1.0) cert.push_back({ElementSubset(m.size()), 1.0 - total_w});
      else if (!cert.empty()) {
        // Renormalize away accumulated rounding in the weights.
        double s = 0.0;
        for (const auto& ws : cert) s += ws.weight;
        for (auto& ws : cert) ws.weight /= s;
      }
      MarginalVector mv =
          MarginalVector::from_certificate(m.size(), scale_b, std::move(cert));
      return {std::move(mv), applied, residual};
    }
    applied *= 0.95;
  }
  throw ConstructionError(
      "certify_in_polytope: could not certify target marginals after scaling");
}

}  // namespace ocrslab
