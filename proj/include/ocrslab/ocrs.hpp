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
#include <numeric>
#include <vector>

#include "ocrslab/errors.hpp"
#include "ocrslab/estimator.hpp"
#include "ocrslab/marginal.hpp"
#include "ocrslab/matroid_union.hpp"
#include "ocrslab/parallel.hpp"
#include "ocrslab/rng.hpp"
#include "ocrslab/stats.hpp"

namespace ocrslab {

/// Default scale parameter b = 1 - sqrt(ln k / k), clamped into (0,1).
inline double default_scale_b(int k) {
  if (k < 1) throw InputError("default_scale_b: k must be >= 1");
  double b = 1.0 - std::sqrt(std::log(static_cast<double>(k)) / k);
  return std::min(0.999999, std::max(1e-6, b));
}

struct ActiveSample {
  ElementSubset active;
  uint64_t seed = 0;
};

/// Independent Bernoulli draws in element-index order from the given stream.
inline ElementSubset sample_active(const MarginalVector& x,
                                   SubstreamRng& rng) {
  ElementSubset active(x.size());
  for (int e = 0; e < x.size(); ++e)
    if (x.x[e] > 0.0 && rng.bernoulli(x.x[e])) active.insert(e);
  return active;
}

inline ActiveSample sample_active(const MarginalVector& x,
                                  const StreamKey& key) {
  SubstreamRng rng(key);
  return {sample_active(x, rng), key.mix()};
}

/// One step of the modified greedy algorithm: accept e iff it is not spanned
/// by the protected set together with what was already accepted. The caller
/// adds e to `accepted` on a true return.
inline bool modified_greedy_step(const Matroid& m,
                                 const ElementSubset& protected_set,
                                 const ElementSubset& accepted, int e) {
  if (protected_set.contains(e))
    throw InputError("modified_greedy_step: element is in the protected set");
  return !m.in_span(accepted | protected_set, e);
}

struct ProtectResult {
  ElementSubset protected_set;
  double estimation_slack = 0.0;  // summed half-widths over decisions taken
};

namespace detail {

/// Monte Carlo protection scan specialized to graphic matroids: one batch of
/// active-set draws yields span-probability estimates for every element at
/// once (an edge is spanned iff its endpoints are connected by the active
/// edges together with S, or it is active itself). Decision semantics mirror
/// the generic per-element path: scanning lowest index first, the first
/// element whose Hoeffding interval clears b is added and the scan restarts;
/// an interval straddling b escalates the batch geometrically and, if still
/// unresolved, raises the usual indeterminate-comparison error.
inline ProtectResult protect_graphic_mc(const GraphicMatroid& g,
                                        const std::vector<double>& xd,
                                        const ElementSubset& dom, double b,
                                        const ExpectationEstimator& est,
                                        SubstreamRng& rng) {
  int n = g.size();
  int nv = g.num_vertices();
  ElementSubset s(n);
  double slack = 0.0;

  std::vector<int> parent(nv);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    int64_t samples = est.config().samples;
    for (int attempt = 0;; ++attempt) {
      std::vector<int64_t> hits(n, 0);
      std::vector<char> active(n, 0);
      for (int64_t t = 0; t < samples; ++t) {
        for (int v = 0; v < nv; ++v) parent[v] = v;
        s.for_each([&](int e) {
          auto [u, v] = g.edges()[e];
          int ru = find(u), rv = find(v);
          if (ru != rv) parent[ru] = rv;
        });
        for (int e = 0; e < n; ++e) {
          active[e] = xd[e] > 0.0 && rng.bernoulli(xd[e]) ? 1 : 0;
          if (active[e]) {
            auto [u, v] = g.edges()[e];
            int ru = find(u), rv = find(v);
            if (ru != rv) parent[ru] = rv;
          }
        }
        for (int e = 0; e < n; ++e) {
          if (active[e]) {
            ++hits[e];
          } else {
            auto [u, v] = g.edges()[e];
            if (find(u) == find(v)) ++hits[e];
          }
        }
      }
      double hw = hoeffding_half_width(1.0, samples,
                                       est.config().confidence_delta);
      int undecided = -1;
      double undecided_est = 0.0;
      int exceed = -1;
      for (int e = 0; e < n; ++e) {
        if (s.contains(e) || !dom.contains(e)) continue;
        double value = static_cast<double>(hits[e]) / samples;
        if (value - hw > b) {
          exceed = e;
          break;
        }
        if (value + hw > b) {  // straddles the threshold
          undecided = e;
          undecided_est = value;
          break;
        }
      }
      if (exceed >= 0) {
        slack += hw;
        s.insert(exceed);
        changed = true;
        break;
      }
      if (undecided < 0) {
        // Whole scan resolved below the threshold.
        dom.for_each([&](int e) {
          if (!s.contains(e)) slack += hw;
        });
        break;
      }
      if (attempt >= est.config().max_escalations)
        throw IndeterminateComparisonError(
            "protect: span probability statistically undecidable against "
            "threshold " +
                std::to_string(b),
            undecided_est, hw, b);
      samples *= 4;
    }
  }
  if (s == dom && !dom.empty())
    throw InvariantError("protect: protection set is the whole ground set");
  return {std::move(s), slack};
}

}  // namespace detail

/// Iteratively grows S with any element whose span probability
/// Pr[e in Span(R(x) + S)] exceeds b. Scan order is lowest index first,
/// restarting from 0 after each insertion. The returned set is checked to be
/// a strict subset of the ground set.
inline ProtectResult protect(const Matroid& m, const MarginalVector& x,
                             double b, const ExpectationEstimator& est,
                             SubstreamRng& rng,
                             const ElementSubset* domain = nullptr) {
  if (x.size() != m.size())
    throw InputError("protect: marginal dimension mismatch");
  ElementSubset dom =
      domain != nullptr ? *domain : ElementSubset::full(m.size());
  std::vector<double> xd = x.x;
  for (int e = 0; e < m.size(); ++e)
    if (!dom.contains(e)) xd[e] = 0.0;
  if (est.config().mode == ExpectationEstimator::Mode::kMonteCarlo) {
    if (const auto* g = dynamic_cast<const GraphicMatroid*>(&m))
      return detail::protect_graphic_mc(*g, xd, dom, b, est, rng);
  }
  ElementSubset s(m.size());
  double slack = 0.0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int e = 0; e < m.size() && !changed; ++e) {
      if (s.contains(e) || !dom.contains(e)) continue;
      auto g = [&](const ElementSubset& active) -> double {
        return m.in_span(active | s, e) ? 1.0 : 0.0;
      };
      auto decision = est.decide_exceeds(xd, g, 1.0, b, rng);
      slack += decision.estimate.half_width;
      if (decision.exceeds) {
        s.insert(e);
        changed = true;
      }
    }
  }
  if (s == dom && !dom.empty())
    throw InvariantError("protect: protection set is the whole ground set");
  return {std::move(s), slack};
}

struct KFoldProtectResult {
  ElementSubset protected_set;   // S = S_0 x [k], over the extended ground
  ElementSubset protected_base;  // S_0, over the base ground
  double estimation_slack = 0.0;
};

/// Occupancy-based protection for an extended k-fold union: adds a whole
/// copy-group whenever E[occ_e(R(x*) + S)] exceeds b*k. When `domain` is
/// given, the scan and sampling are confined to it (the restriction of an
/// extended union to a copy-group union is again an extended union).
inline KFoldProtectResult kfold_protect(const ExtendedKFoldUnion& mk,
                                        const MarginalVector& xstar, double b,
                                        const ExpectationEstimator& est,
                                        SubstreamRng& rng,
                                        const ElementSubset* domain = nullptr) {
  if (xstar.size() != mk.size())
    throw InputError("kfold_protect: marginal dimension mismatch");
  ElementSubset dom =
      domain != nullptr ? *domain : ElementSubset::full(mk.size());
  if (domain != nullptr && !mk.is_copy_group_union(dom))
    throw InputError("kfold_protect: domain is not a union of copy-groups");
  std::vector<double> xd = xstar.x;
  for (int i = 0; i < mk.size(); ++i)
    if (!dom.contains(i)) xd[i] = 0.0;

  int k = mk.fold();
  ElementSubset s(mk.size());
  ElementSubset s0(mk.base_size());
  double slack = 0.0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int e = 0; e < mk.base_size() && !changed; ++e) {
      if (s0.contains(e)) continue;
      if (!mk.copy_group(e).is_subset_of(dom)) continue;
      auto g = [&](const ElementSubset& active) -> double {
        return static_cast<double>(mk.occupancy(e, active | s));
      };
      auto decision = est.decide_exceeds(
          xd, g, static_cast<double>(k), b * k, rng);
      slack += decision.estimate.half_width;
      if (decision.exceeds) {
        s0.insert(e);
        s |= mk.copy_group(e);
        changed = true;
      }
    }
  }
  if (s == dom && !dom.empty())
    throw InvariantError("kfold_protect: protection set equals the domain");
  return {std::move(s), std::move(s0), slack};
}

/// Nested protection levels N_0 ⊋ N_1 ⊋ ... ⊋ N_ℓ = ∅.
struct ChainDecomposition {
  std::vector<ElementSubset> levels;
  std::vector<int> level_of;  // per element: j with element in N_j \ N_{j+1}
  double estimation_slack = 0.0;

  int length() const { return static_cast<int>(levels.size()) - 1; }

  void finalize() {
    if (levels.empty() || !levels.back().empty())
      throw InvariantError("ChainDecomposition: last level must be empty");
    int n = levels.front().universe_size();
    level_of.assign(n, -1);
    for (int j = 0; j + 1 < static_cast<int>(levels.size()); ++j) {
      ElementSubset gap = levels[j] - levels[j + 1];
      gap.for_each([&](int e) { level_of[e] = j; });
    }
    levels.front().for_each([&](int e) {
      if (level_of[e] < 0)
        throw InvariantError("ChainDecomposition: element in no level gap");
    });
  }
};

/// Chain decomposition by repeated KFoldProtect on restricted extended
/// unions. Strict nesting and copy-group structure are asserted per level.
inline ChainDecomposition build_chain(const ExtendedKFoldUnion& mk,
                                      const MarginalVector& xstar, double b,
                                      const ExpectationEstimator& est,
                                      SubstreamRng& rng) {
  ChainDecomposition chain;
  chain.levels.push_back(ElementSubset::full(mk.size()));
  while (!chain.levels.back().empty()) {
    const ElementSubset& dom = chain.levels.back();
    auto result = kfold_protect(mk, xstar, b, est, rng, &dom);
    chain.estimation_slack += result.estimation_slack;
    if (!result.protected_set.is_subset_of(dom) ||
        result.protected_set == dom)
      throw InvariantError("build_chain: levels are not strictly nested");
    if (!mk.is_copy_group_union(result.protected_set))
      throw InvariantError(
          "build_chain: level is not a union of copy-groups");
    chain.levels.push_back(std::move(result.protected_set));
  }
  chain.finalize();
  return chain;
}

/// Chain decomposition by repeated span-probability Protect, for plain
/// matroids (the b(1-b) scheme).
inline ChainDecomposition build_plain_chain(const Matroid& m,
                                            const MarginalVector& x, double b,
                                            const ExpectationEstimator& est,
                                            SubstreamRng& rng) {
  ChainDecomposition chain;
  chain.levels.push_back(ElementSubset::full(m.size()));
  while (!chain.levels.back().empty()) {
    // Ranks of subsets of the level agree with the parent matroid, so the
    // restriction is implicit in the domain-limited scan.
    const ElementSubset& dom = chain.levels.back();
    auto result = protect(m, x, b, est, rng, &dom);
    chain.estimation_slack += result.estimation_slack;
    if (result.protected_set == dom)
      throw InvariantError(
          "build_plain_chain: levels are not strictly nested");
    chain.levels.push_back(std::move(result.protected_set));
  }
  chain.finalize();
  return chain;
}

struct ElementOutcome {
  bool active = false;
  bool kept = false;  // survived the down-sample gate
  int level = -1;
  bool accepted = false;
};

struct OcrsRunLog {
  std::vector<int> order;
  std::vector<ElementOutcome> outcomes;  // indexed by element
  ElementSubset accepted;
};

/// Executes OCRS runs against a fixed (matroid, marginals, chain, gate).
/// Holds per-level scratch so repeated trials do not reallocate.
class OcrsEngine {
 public:
  OcrsEngine(const Matroid& m, const MarginalVector& x,
             const ChainDecomposition& chain, double gate_prob)
      : m_(m), x_(x), chain_(chain), gate_prob_(gate_prob) {
    if (x.size() != m.size())
      throw InputError("OcrsEngine: marginal dimension mismatch");
    if (chain.level_of.empty() && m.size() > 0)
      throw InputError("OcrsEngine: chain not finalized");
    int l = chain.length();
    base_sets_.reserve(l);
    base_ranks_.reserve(l);
    for (int j = 0; j < l; ++j) {
      base_sets_.push_back(chain.levels[j + 1]);
      base_ranks_.push_back(m.rank(chain.levels[j + 1]));
    }
    accepted_ = ElementSubset(m.size());
  }

  /// Resets the per-run state.
  void begin_run() {
    int l = chain_.length();
    work_sets_.resize(l);
    work_ranks_.resize(l);
    for (int j = 0; j < l; ++j) {
      work_sets_[j] = base_sets_[j];
      work_ranks_[j] = base_ranks_[j];
    }
    accepted_.clear();
    accepted_count_ = 0;
  }

  /// Processes one active arrival that survived the down-sample gate: the
  /// modified greedy step at e's chain level. Returns whether e was accepted;
  /// feasibility of the accepted set is asserted after every acceptance.
  bool arrive_kept(int e) {
    int j = chain_.level_of[e];
    if (j < 0) throw InvariantError("run_ocrs: element in no level gap");
    int r = m_.rank_with(work_sets_[j], e);
    if (r <= work_ranks_[j]) return false;
    work_sets_[j].insert(e);
    work_ranks_[j] = r;
    accepted_.insert(e);
    ++accepted_count_;
    if (m_.rank(accepted_) != accepted_count_)
      throw InvariantError(
          "run_ocrs: accepted set is dependent (feasibility broken)");
    return true;
  }

  int level_of(int e) const { return chain_.level_of[e]; }
  const ElementSubset& accepted() const { return accepted_; }

  /// One full online pass. Active draws come from `act_rng` in element-index
  /// order; one gate draw per active arrival comes from `gate_rng`. Feasibility
  /// of the accepted set is asserted at every prefix.
  const ElementSubset& run(const std::vector<int>& order, SubstreamRng& act_rng,
                           SubstreamRng& gate_rng, OcrsRunLog* log = nullptr) {
    ElementSubset active = sample_active(x_, act_rng);
    return run_with_active(order, active, gate_rng, log);
  }

  const ElementSubset& run_with_active(const std::vector<int>& order,
                                       const ElementSubset& active,
                                       SubstreamRng& gate_rng,
                                       OcrsRunLog* log = nullptr) {
    begin_run();
    if (log != nullptr) {
      log->order = order;
      log->outcomes.assign(m_.size(), ElementOutcome{});
      log->accepted = ElementSubset(m_.size());
    }
    for (int e : order) {
      ElementOutcome out;
      out.active = active.contains(e);
      if (out.active) {
        out.kept = gate_rng.bernoulli(gate_prob_);
        if (out.kept) {
          out.level = chain_.level_of[e];
          out.accepted = arrive_kept(e);
        }
      }
      if (log != nullptr) log->outcomes[e] = out;
    }
    if (log != nullptr) log->accepted = accepted_;
    return accepted_;
  }

 private:
  const Matroid& m_;
  const MarginalVector& x_;
  const ChainDecomposition& chain_;
  double gate_prob_;

  std::vector<ElementSubset> base_sets_;  // N_{j+1} per level j
  std::vector<int> base_ranks_;
  std::vector<ElementSubset> work_sets_;  // A_j ∪ N_{j+1}, reset per run
  std::vector<int> work_ranks_;
  ElementSubset accepted_;
  int accepted_count_ = 0;
};

/// One-shot convenience wrapper over OcrsEngine.
inline OcrsRunLog run_ocrs(const Matroid& m, const MarginalVector& x,
                           const ChainDecomposition& chain,
                           const std::vector<int>& order, double gate_prob,
                           SubstreamRng& act_rng, SubstreamRng& gate_rng) {
  OcrsEngine engine(m, x, chain, gate_prob);
  OcrsRunLog log;
  engine.run(order, act_rng, gate_rng, &log);
  return log;
}

enum class OrderPolicy { kFixed, kUniformRandom, kWorstOfList };

struct SelectabilityConfig {
  int64_t trials = 100000;
  OrderPolicy policy = OrderPolicy::kFixed;
  std::vector<std::vector<int>> orders;  // fixed: first; worst-of-list: all
  double gate_prob = 1.0;
  uint64_t master_seed = 0;
  int threads = 1;
  int64_t chunk_size = 1024;
  std::string module_tag = "ocrs-select";
};

struct ElementSelectability {
  int64_t actives = 0;
  int64_t accepts = 0;
  bool defined = false;  // false when never active (or x_e = 0)
  double rate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 1.0;
};

struct SelectabilityReport {
  std::vector<ElementSelectability> elements;
  double min_rate = 1.0;
  double min_rate_ci_lo = 0.0;
  int min_element = -1;
  std::vector<int> undefined_elements;
  int64_t trials = 0;
};

/// Per-element acceptance rate conditioned on being active, with Wilson 95%
/// intervals. The minimum excludes elements with x_e = 0 and flags elements
/// that were never active.
inline SelectabilityReport estimate_selectability(
    const Matroid& m, const MarginalVector& x, const ChainDecomposition& chain,
    const SelectabilityConfig& cfg) {
  int n = m.size();
  std::vector<int> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  const std::vector<int>& base_order =
      cfg.orders.empty() ? identity : cfg.orders.front();

  auto run_policy = [&](const std::vector<int>* fixed_order, uint64_t salt) {
    int64_t num_chunks =
        (cfg.trials + cfg.chunk_size - 1) / cfg.chunk_size;
    int workers = std::max(1, cfg.threads);
    std::vector<std::vector<int64_t>> actives(workers,
                                              std::vector<int64_t>(n, 0));
    std::vector<std::vector<int64_t>> accepts(workers,
                                              std::vector<int64_t>(n, 0));
    parallel_chunks(num_chunks, workers, [&](int64_t chunk, int w) {
      OcrsEngine engine(m, x, chain, cfg.gate_prob);
      std::vector<int> order = *(
          fixed_order != nullptr ? fixed_order : &base_order);
      int64_t lo = chunk * cfg.chunk_size;
      int64_t hi = std::min<int64_t>(cfg.trials, lo + cfg.chunk_size);
      for (int64_t t = lo; t < hi; ++t) {
        SubstreamRng act(cfg.master_seed, cfg.module_tag,
                         static_cast<uint64_t>(t) ^ salt, "active");
        SubstreamRng gate(cfg.master_seed, cfg.module_tag,
                          static_cast<uint64_t>(t) ^ salt, "gate");
        if (cfg.policy == OrderPolicy::kUniformRandom) {
          SubstreamRng ord(cfg.master_seed, cfg.module_tag,
                           static_cast<uint64_t>(t) ^ salt, "order");
          order = base_order;
          ord.shuffle(order);
        }
        ElementSubset active = sample_active(x, act);
        const ElementSubset& acc =
            engine.run_with_active(order, active, gate);
        active.for_each([&](int e) {
          ++actives[w][e];
          if (acc.contains(e)) ++accepts[w][e];
        });
      }
    });
    std::vector<std::pair<int64_t, int64_t>> totals(n, {0, 0});
    for (int w = 0; w < workers; ++w)
      for (int e = 0; e < n; ++e) {
        totals[e].first += actives[w][e];
        totals[e].second += accepts[w][e];
      }
    return totals;
  };

  std::vector<std::vector<std::pair<int64_t, int64_t>>> per_order;
  if (cfg.policy == OrderPolicy::kWorstOfList) {
    if (cfg.orders.empty())
      throw InputError("estimate_selectability: worst-of-list needs orders");
    for (size_t i = 0; i < cfg.orders.size(); ++i)
      per_order.push_back(run_policy(&cfg.orders[i], 0x9e37 * (i + 1)));
  } else {
    per_order.push_back(run_policy(
        cfg.policy == OrderPolicy::kFixed ? &base_order : nullptr, 0));
  }

  SelectabilityReport report;
  report.trials = cfg.trials;
  report.elements.assign(n, ElementSelectability{});
  for (int e = 0; e < n; ++e) {
    // Worst order for this element.
    int best_idx = 0;
    double worst_rate = 2.0;
    for (size_t i = 0; i < per_order.size(); ++i) {
      auto [act, acc] = per_order[i][e];
      double rate = act > 0 ? static_cast<double>(acc) / act : 2.0;
      if (rate < worst_rate) {
        worst_rate = rate;
        best_idx = static_cast<int>(i);
      }
    }
    auto [act, acc] = per_order[best_idx][e];
    ElementSelectability& es = report.elements[e];
    es.actives = act;
    es.accepts = acc;
    if (x.x[e] <= 0.0) continue;  // never active by construction, excluded
    if (act == 0) {
      report.undefined_elements.push_back(e);
      continue;
    }
    es.defined = true;
    es.rate = static_cast<double>(acc) / act;
    auto wi = wilson_interval(acc, act);
    es.ci_lo = wi.lo;
    es.ci_hi = wi.hi;
    if (report.min_element < 0 || es.rate < report.min_rate) {
      report.min_rate = es.rate;
      report.min_rate_ci_lo = es.ci_lo;
      report.min_element = e;
    }
  }
  return report;
}

}  // namespace ocrslab
