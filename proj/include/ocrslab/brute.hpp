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
#include <cstdint>
#include <vector>

#include "ocrslab/errors.hpp"
#include "ocrslab/matroid.hpp"

namespace ocrslab {

// Reference implementations by exhaustive search. Deliberately simple and
// slow; they define correctness for the fast paths and are reused by the
// verify-oracles pipeline.

/// Union rank by exhaustive partition search: the largest subset of `s` whose
/// elements can be assigned to the base matroids with every part independent.
/// Backtracking over per-element choices (skip, or one of the parts); guarded
/// to tiny inputs.
inline int brute_union_rank(const std::vector<const Matroid*>& bases,
                            const ElementSubset& s) {
  if (bases.empty()) throw InputError("brute_union_rank: no base matroids");
  int n = bases.front()->size();
  if (s.count() > 16 || bases.size() > 4)
    throw CapabilityError("brute_union_rank: input beyond enumeration guard");
  std::vector<int> elems = s.to_indices();
  int k = static_cast<int>(bases.size());
  std::vector<ElementSubset> parts(k, ElementSubset(n));
  int best = 0;

  auto recurse = [&](auto&& self, size_t i, int placed) -> void {
    best = std::max(best, placed);
    if (i == elems.size()) return;
    if (placed + static_cast<int>(elems.size() - i) <= best) return;
    int e = elems[i];
    for (int j = 0; j < k; ++j) {
      if (bases[j]->rank_with(parts[j], e) == parts[j].count() + 1) {
        parts[j].insert(e);
        self(self, i + 1, placed + 1);
        parts[j].erase(e);
      }
    }
    self(self, i + 1, placed);  // leave e out
  };
  recurse(recurse, 0, 0);
  return best;
}

/// Maximum-weight independent set by enumerating every subset of the support.
struct BruteOpt {
  double value = 0.0;
  ElementSubset set;
};

inline BruteOpt brute_max_weight_independent(const Matroid& m,
                                             const std::vector<double>& w) {
  if (static_cast<int>(w.size()) != m.size())
    throw InputError("brute_max_weight_independent: dimension mismatch");
  std::vector<int> support;
  for (int e = 0; e < m.size(); ++e)
    if (w[e] > 0.0) support.push_back(e);
  if (support.size() > 20)
    throw CapabilityError(
        "brute_max_weight_independent: support beyond enumeration guard");
  BruteOpt best;
  best.set = ElementSubset(m.size());
  for (uint64_t mask = 0; mask < (uint64_t{1} << support.size()); ++mask) {
    ElementSubset cand(m.size());
    double total = 0.0;
    for (size_t i = 0; i < support.size(); ++i)
      if ((mask >> i) & 1) {
        cand.insert(support[i]);
        total += w[support[i]];
      }
    if (total > best.value && m.independent(cand)) {
      best.value = total;
      best.set = cand;
    }
  }
  return best;
}

/// Pr[Bin(n, p) >= k] by the pmf recurrence pmf(i+1) = pmf(i) * (n-i)/(i+1)
/// * p/(1-p); an lgamma-free cross-check of the closed-form tail.
inline double brute_binomial_upper_tail(int64_t n, int64_t k, double p) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  // Work in log space to survive large n.
  long double log_pmf = n * std::log1p(-static_cast<long double>(p));
  long double logit = std::log(static_cast<long double>(p)) -
                      std::log1p(-static_cast<long double>(p));
  long double tail = 0.0L, below = 0.0L;
  for (int64_t i = 0; i <= n; ++i) {
    if (i >= k)
      tail += std::exp(log_pmf);
    else
      below += std::exp(log_pmf);
    if (i < n)
      log_pmf += std::log(static_cast<long double>(n - i)) -
                 std::log(static_cast<long double>(i + 1)) + logit;
  }
  // Use whichever side accumulated less mass for accuracy.
  double result = tail <= below ? static_cast<double>(tail)
                                : static_cast<double>(1.0L - below);
  return std::min(1.0, std::max(0.0, result));
}

/// Exhaustively checks rank axioms on every subset: empty rank, monotone
/// unit increments, and submodularity via the local exchange condition
/// rank(S+a) + rank(S+b) >= rank(S+a+b) + rank(S). Throws on violation.
inline void check_rank_axioms_exhaustive(const Matroid& m) {
  int n = m.size();
  if (n > 12)
    throw CapabilityError("check_rank_axioms_exhaustive: |E| > 12");
  uint64_t total = uint64_t{1} << n;
  std::vector<int> rank(total);
  for (uint64_t mask = 0; mask < total; ++mask)
    rank[mask] = m.rank(ElementSubset::from_mask(n, mask));
  if (rank[0] != 0) throw InvariantError("axioms: rank(empty) != 0");
  for (uint64_t mask = 0; mask < total; ++mask) {
    for (int a = 0; a < n; ++a) {
      if ((mask >> a) & 1) continue;
      uint64_t with_a = mask | (uint64_t{1} << a);
      int delta = rank[with_a] - rank[mask];
      if (delta < 0 || delta > 1)
        throw InvariantError("axioms: non-unit rank increment");
      for (int b = a + 1; b < n; ++b) {
        if ((mask >> b) & 1) continue;
        uint64_t with_b = mask | (uint64_t{1} << b);
        uint64_t with_ab = with_a | with_b;
        if (rank[with_a] + rank[with_b] < rank[with_ab] + rank[mask])
          throw InvariantError("axioms: submodularity violated");
      }
    }
  }
}

}  // namespace ocrslab
