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
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ocrslab/errors.hpp"
#include "ocrslab/graphs.hpp"
#include "ocrslab/parallel.hpp"
#include "ocrslab/prophet.hpp"
#include "ocrslab/stats.hpp"

namespace ocrslab {

/// Derived hardness instance on the graphic matroid of a split graph H: each
/// edge (a_i, b_i) of the source graph G becomes a fresh midpoint vertex u_i
/// with the edge pair f_i = (a_i, u_i) and f'_i = (u_i, b_i). Pair i occupies
/// element indices 2i (the deterministic unit edge f_i) and 2i+1 (the risky
/// edge f'_i worth 1/eps with probability eps). Arrival order is
/// f_1, f'_1, f_2, f'_2, ...
struct HardGirthInstance {
  Graph source;
  Graph derived;
  double epsilon = 0.0;

  int num_pairs() const { return source.num_edges(); }

  /// Expected value of taking the better edge of every pair independently:
  /// m * (2 - eps). A lower bound on E[OPT] of the derived instance.
  double pairwise_opt_expectation() const {
    return num_pairs() * (2.0 - epsilon);
  }

  /// Analytic ceiling on any online algorithm's expected value:
  /// m + n * (1 + 1/eps), with n, m counted in the source graph.
  double online_ceiling() const {
    return num_pairs() + source.num_vertices * (1.0 + 1.0 / epsilon);
  }

  ProphetInstance to_prophet() const {
    ProphetInstance inst;
    inst.matroid = std::make_shared<GraphicMatroid>(derived.num_vertices,
                                                    derived.edges);
    inst.dists.reserve(derived.edges.size());
    for (int i = 0; i < num_pairs(); ++i) {
      inst.dists.push_back(DiscreteDistribution::point_mass(1.0));
      inst.dists.push_back(
          DiscreteDistribution::bernoulli_value(1.0 / epsilon, epsilon));
    }
    inst.order = ProphetInstance::identity_order(inst.size());
    return inst;
  }

  /// Pairs with both edges in `accepted`. Each such pair closes the path
  /// a_i - u_i - b_i, so a forest can hold at most n-1 of them; that bound is
  /// asserted here.
  int count_double_pairs(const ElementSubset& accepted) const {
    int pairs = 0;
    for (int i = 0; i < num_pairs(); ++i)
      if (accepted.contains(2 * i) && accepted.contains(2 * i + 1)) ++pairs;
    if (pairs > source.num_vertices - 1)
      throw InvariantError(
          "HardGirthInstance: forest holds more than n-1 full pairs");
    return pairs;
  }
};

inline HardGirthInstance build_hard_instance(const Graph& g, double epsilon) {
  g.validate();
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw InputError("build_hard_instance: epsilon must be in (0,1]");
  if (g.num_edges() == 0)
    throw InputError("build_hard_instance: source graph has no edges");
  HardGirthInstance inst;
  inst.source = g;
  inst.epsilon = epsilon;
  inst.derived.num_vertices = g.num_vertices + g.num_edges();
  for (int i = 0; i < g.num_edges(); ++i) {
    auto [a, b] = g.edges[i];
    int mid = g.num_vertices + i;
    inst.derived.edges.emplace_back(a, mid);
    inst.derived.edges.emplace_back(mid, b);
  }
  // Splitting every edge doubles each cycle length and creates no new cycle.
  auto gg = g.girth();
  auto hg = inst.derived.girth();
  if (gg.has_value() != hg.has_value() ||
      (gg.has_value() && *hg != 2 * *gg))
    throw InvariantError("build_hard_instance: girth did not double");
  return inst;
}

/// One experiment row: a (graph, policy) cell of the lower-bound study.
struct GirthBoundRow {
  std::string graph_name;
  std::string policy_name;
  int source_vertices = 0;
  int source_edges = 0;
  int girth_source = 0;
  int girth_derived = 0;
  double epsilon = 0.0;

  double alg_mean = 0.0;
  double alg_half_width = 0.0;
  double opt_mean = 0.0;  // offline optimum, shared realizations
  double opt_half_width = 0.0;
  double pairwise_mean = 0.0;  // sum of per-pair maxima
  double pairwise_half_width = 0.0;
  double pairwise_expectation = 0.0;  // m(2 - eps), closed form
  double online_ceiling = 0.0;        // m + n(1 + 1/eps)
  double ratio = 0.0;                 // alg / offline opt
  double ratio_half_width = 0.0;
  int max_double_pairs = 0;
  int double_pair_cap = 0;  // n - 1
  int64_t trials = 0;
};

struct GirthBoundConfig {
  double epsilon = 0.25;
  int64_t trials = 2000;
  uint64_t master_seed = 0;
  int threads = 1;
  int64_t chunk_size = 64;
  std::string module_tag = "girth-bound";
};

/// Runs one policy against one hardness instance. The offline optimum and
/// the pairwise-max statistic are measured on the same value realizations as
/// the algorithm. Chunk accumulators fold in chunk order for thread-count
/// independence.
inline GirthBoundRow measure_girth_bound(const std::string& graph_name,
                                         const HardGirthInstance& hard,
                                         const std::string& policy_name,
                                         const GamblerPolicy& policy,
                                         const GirthBoundConfig& cfg) {
  ProphetInstance inst = hard.to_prophet();
  inst.validate();
  int64_t num_chunks = (cfg.trials + cfg.chunk_size - 1) / cfg.chunk_size;
  std::vector<RunningMean> alg_c(num_chunks), opt_c(num_chunks),
      pair_c(num_chunks);
  std::vector<int> max_pairs_c(num_chunks, 0);
  parallel_chunks(num_chunks, std::max(1, cfg.threads),
                  [&](int64_t chunk, int) {
    int64_t lo = chunk * cfg.chunk_size;
    int64_t hi = std::min<int64_t>(cfg.trials, lo + cfg.chunk_size);
    for (int64_t t = lo; t < hi; ++t) {
      SubstreamRng vr(cfg.master_seed, cfg.module_tag,
                      static_cast<uint64_t>(t), "values");
      SubstreamRng pr(cfg.master_seed, cfg.module_tag,
                      static_cast<uint64_t>(t), "policy");
      auto values = inst.sample_values(vr);
      auto run = run_gambler(inst, policy, values, pr);
      alg_c[chunk].add(run.value);
      opt_c[chunk].add(offline_opt(*inst.matroid, values).value);
      double pairwise = 0.0;
      for (int i = 0; i < hard.num_pairs(); ++i)
        pairwise += std::max(values[2 * i], values[2 * i + 1]);
      pair_c[chunk].add(pairwise);
      max_pairs_c[chunk] = std::max(max_pairs_c[chunk],
                                    hard.count_double_pairs(run.accepted));
    }
  });
  RunningMean alg, opt, pair;
  int max_pairs = 0;
  for (int64_t c = 0; c < num_chunks; ++c) {
    alg.merge(alg_c[c]);
    opt.merge(opt_c[c]);
    pair.merge(pair_c[c]);
    max_pairs = std::max(max_pairs, max_pairs_c[c]);
  }

  GirthBoundRow row;
  row.graph_name = graph_name;
  row.policy_name = policy_name;
  row.source_vertices = hard.source.num_vertices;
  row.source_edges = hard.source.num_edges();
  row.girth_source = hard.source.girth().value_or(0);
  row.girth_derived = hard.derived.girth().value_or(0);
  row.epsilon = hard.epsilon;
  row.alg_mean = alg.mean();
  row.alg_half_width = alg.ci95_half_width();
  row.opt_mean = opt.mean();
  row.opt_half_width = opt.ci95_half_width();
  row.pairwise_mean = pair.mean();
  row.pairwise_half_width = pair.ci95_half_width();
  row.pairwise_expectation = hard.pairwise_opt_expectation();
  row.online_ceiling = hard.online_ceiling();
  RatioEstimate ratio{alg.mean(), row.alg_half_width, opt.mean(),
                      row.opt_half_width};
  row.ratio = ratio.ratio();
  row.ratio_half_width = ratio.ci_half_width();
  row.max_double_pairs = max_pairs;
  row.double_pair_cap = hard.source.num_vertices - 1;
  row.trials = cfg.trials;
  return row;
}

}  // namespace ocrslab
