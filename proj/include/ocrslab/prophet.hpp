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
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ocrslab/errors.hpp"
#include "ocrslab/estimator.hpp"
#include "ocrslab/marginal.hpp"
#include "ocrslab/matroid_union.hpp"
#include "ocrslab/ocrs.hpp"
#include "ocrslab/parallel.hpp"
#include "ocrslab/rng.hpp"
#include "ocrslab/stats.hpp"

namespace ocrslab {

/// Finite-support value distribution. Atoms may repeat in the input; they are
/// merged on validation.
class DiscreteDistribution {
 public:
  struct Atom {
    double value = 0.0;
    double prob = 0.0;
  };

  DiscreteDistribution() = default;
  explicit DiscreteDistribution(std::vector<Atom> atoms) {
    std::map<double, double> merged;
    for (const auto& a : atoms) {
      if (!std::isfinite(a.value) || a.value < 0.0)
        throw InputError("DiscreteDistribution: values must be finite, >= 0");
      if (a.prob < 0.0)
        throw InputError("DiscreteDistribution: negative probability");
      merged[a.value] += a.prob;
    }
    double total = 0.0;
    for (auto& [v, p] : merged) {
      total += p;
      if (p > 0.0) atoms_.push_back({v, p});
    }
    if (std::fabs(total - 1.0) > 1e-9)
      throw InputError("DiscreteDistribution: probabilities must sum to 1");
    if (atoms_.empty())
      throw InputError("DiscreteDistribution: empty support");
    // Renormalize away rounding from the input.
    for (auto& a : atoms_) a.prob /= total;
  }

  static DiscreteDistribution point_mass(double v) {
    return DiscreteDistribution({{v, 1.0}});
  }

  /// Value v with probability p, otherwise 0.
  static DiscreteDistribution bernoulli_value(double v, double p) {
    if (p < 0.0 || p > 1.0)
      throw InputError("bernoulli_value: p out of [0,1]");
    if (p >= 1.0) return point_mass(v);
    if (p <= 0.0) return point_mass(0.0);
    return DiscreteDistribution({{0.0, 1.0 - p}, {v, p}});
  }

  const std::vector<Atom>& atoms() const { return atoms_; }

  double mean() const {
    double m = 0.0;
    for (const auto& a : atoms_) m += a.value * a.prob;
    return m;
  }

  double max_value() const { return atoms_.back().value; }

  /// Inverse-CDF draw; atoms are visited in increasing value order.
  double sample(SubstreamRng& rng) const {
    double u = rng.uniform01();
    double cum = 0.0;
    for (const auto& a : atoms_) {
      cum += a.prob;
      if (u < cum) return a.value;
    }
    return atoms_.back().value;
  }

  /// Upper-quantile activation rule: the unique (tau, gamma) with
  /// Pr[V > tau] + gamma * Pr[V = tau] = x, so that accepting on V > tau and
  /// on V = tau with probability gamma activates with probability exactly x.
  struct Quantile {
    double threshold = std::numeric_limits<double>::infinity();
    double tie_accept_prob = 0.0;
  };

  Quantile upper_quantile(double x) const {
    if (x < -1e-12 || x > 1.0 + 1e-12)
      throw InputError("upper_quantile: x out of [0,1]");
    x = std::clamp(x, 0.0, 1.0);
    Quantile q;
    if (x <= 0.0) return q;  // never activate
    double above = 0.0;  // Pr[V > tau] as tau sweeps down the support
    for (auto it = atoms_.rbegin(); it != atoms_.rend(); ++it) {
      if (above + it->prob >= x - 1e-15) {
        q.threshold = it->value;
        q.tie_accept_prob = std::clamp((x - above) / it->prob, 0.0, 1.0);
        return q;
      }
      above += it->prob;
    }
    // x exceeds the total mass only through rounding; always activate.
    q.threshold = atoms_.front().value;
    q.tie_accept_prob = 1.0;
    return q;
  }

 private:
  std::vector<Atom> atoms_;  // strictly increasing values, positive probs
};

/// A prophet-inequality instance: one independent value distribution per
/// element of the matroid ground set, revealed in `order`.
struct ProphetInstance {
  MatroidPtr matroid;
  std::vector<DiscreteDistribution> dists;
  std::vector<int> order;

  int size() const { return matroid ? matroid->size() : 0; }

  void validate() const {
    if (!matroid) throw InputError("ProphetInstance: missing matroid");
    if (static_cast<int>(dists.size()) != matroid->size())
      throw InputError("ProphetInstance: one distribution per element needed");
    if (static_cast<int>(order.size()) != matroid->size())
      throw InputError("ProphetInstance: order must be a permutation");
    std::vector<char> seen(matroid->size(), 0);
    for (int e : order) {
      if (e < 0 || e >= matroid->size() || seen[e])
        throw InputError("ProphetInstance: order must be a permutation");
      seen[e] = 1;
    }
  }

  static std::vector<int> identity_order(int n) {
    std::vector<int> o(n);
    std::iota(o.begin(), o.end(), 0);
    return o;
  }

  /// One independent value draw per element, in index order.
  std::vector<double> sample_values(SubstreamRng& rng) const {
    std::vector<double> v(dists.size());
    for (size_t e = 0; e < dists.size(); ++e) v[e] = dists[e].sample(rng);
    return v;
  }
};

namespace detail {

/// Incremental independence maintenance for greedy passes. Graphic matroids
/// get a dedicated union-find; everything else falls back to rank_with on
/// the running set.
class IncrementalIndependence {
 public:
  explicit IncrementalIndependence(const Matroid& m)
      : m_(m),
        graphic_(dynamic_cast<const GraphicMatroid*>(&m)),
        set_(m.size()) {
    if (graphic_ != nullptr) {
      parent_.resize(graphic_->num_vertices());
      std::iota(parent_.begin(), parent_.end(), 0);
    }
  }

  /// Adds e if it keeps the set independent; reports whether it did.
  bool try_insert(int e) {
    if (graphic_ != nullptr) {
      auto [u, v] = graphic_->edges()[e];
      int ru = find(u), rv = find(v);
      if (ru == rv) return false;
      parent_[ru] = rv;
    } else if (m_.rank_with(set_, e) <= rank_) {
      return false;
    }
    set_.insert(e);
    ++rank_;
    return true;
  }

  const ElementSubset& set() const { return set_; }
  int rank() const { return rank_; }

 private:
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  const Matroid& m_;
  const GraphicMatroid* graphic_;
  ElementSubset set_;
  int rank_ = 0;
  std::vector<int> parent_;
};

}  // namespace detail

struct OfflineOpt {
  double value = 0.0;
  ElementSubset set;
};

/// Max-weight independent set for nonnegative values: greedy over positive
/// values in decreasing order (ties broken by lower index). Zero-valued
/// elements are left out; they never change the optimum value.
inline OfflineOpt offline_opt(const Matroid& m,
                              const std::vector<double>& values) {
  if (static_cast<int>(values.size()) != m.size())
    throw InputError("offline_opt: value vector dimension mismatch");
  std::vector<int> order;
  for (int e = 0; e < m.size(); ++e)
    if (values[e] > 0.0) order.push_back(e);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[a] > values[b]; });
  OfflineOpt opt;
  detail::IncrementalIndependence inc(m);
  for (int e : order)
    if (inc.try_insert(e)) opt.value += values[e];
  opt.set = inc.set();
  return opt;
}

/// An OCRS-based gambler policy prepared from an instance: activation
/// quantiles matched to certified marginals, plus a protection chain and
/// down-sample gate for the instance's matroid.
class OcrsProphetPolicy {
 public:
  struct Config {
    double b = 0.5;                 // chain/gate scale
    double gate_prob = -1.0;        // < 0: use b (plain-pipeline default)
    int64_t marginal_trials = 20000;
    // Shrink factor applied to the empirical marginals before certification.
    // Elements that appear in every sampled optimum have an empirical
    // marginal of exactly 1; after the chain scales by b their partners can
    // sit exactly on the protection threshold, which a Monte Carlo estimator
    // can never resolve. Any factor < 1 keeps the marginals in the polytope
    // and turns such ties into decisive margins.
    double marginal_scale = 1.0;
    ExpectationEstimator::Config estimator;
    uint64_t master_seed = 0;
    std::string module_tag = "prophet-ocrs";
  };

  static OcrsProphetPolicy build(const ProphetInstance& inst,
                                 const Config& cfg) {
    inst.validate();
    if (!(cfg.b > 0.0 && cfg.b <= 1.0))
      throw InputError("OcrsProphetPolicy: b must be in (0,1]");
    if (!(cfg.marginal_scale > 0.0 && cfg.marginal_scale <= 1.0))
      throw InputError("OcrsProphetPolicy: marginal_scale must be in (0,1]");
    OcrsProphetPolicy pol;
    pol.matroid_ = inst.matroid;
    pol.gate_prob_ = cfg.gate_prob >= 0.0 ? cfg.gate_prob : cfg.b;

    // Empirical marginals of the offline optimum.
    int n = inst.size();
    std::vector<int64_t> hits(n, 0);
    for (int64_t t = 0; t < cfg.marginal_trials; ++t) {
      SubstreamRng vr(cfg.master_seed, cfg.module_tag,
                      static_cast<uint64_t>(t), "opt-marginals");
      auto values = inst.sample_values(vr);
      offline_opt(*inst.matroid, values).set.for_each([&](int e) {
        ++hits[e];
      });
    }
    std::vector<double> xhat(n);
    for (int e = 0; e < n; ++e)
      xhat[e] = cfg.marginal_scale * static_cast<double>(hits[e]) /
                cfg.marginal_trials;

    auto cert = certify_in_polytope(*inst.matroid, xhat);
    pol.marginals_ = std::move(cert.marginal);
    pol.applied_scale_ = cert.applied_scale;
    pol.marginals_.validate(*inst.matroid);

    pol.quantiles_.resize(n);
    for (int e = 0; e < n; ++e)
      pol.quantiles_[e] = inst.dists[e].upper_quantile(pol.marginals_.x[e]);

    ExpectationEstimator est(cfg.estimator);
    SubstreamRng chain_rng(cfg.master_seed, cfg.module_tag, 0, "chain");
    MarginalVector shrunk = pol.marginals_.shrunk(cfg.b);
    pol.chain_ = build_plain_chain(*inst.matroid, shrunk, cfg.b, est,
                                   chain_rng);
    pol.shrunk_ = std::move(shrunk);
    return pol;
  }

  const MarginalVector& marginals() const { return marginals_; }
  double applied_scale() const { return applied_scale_; }
  double gate_prob() const { return gate_prob_; }
  const ChainDecomposition& chain() const { return chain_; }

  /// Per-trial execution state; cheap to reset between trials.
  class Run {
   public:
    explicit Run(const OcrsProphetPolicy& pol)
        : pol_(pol),
          engine_(*pol.matroid_, pol.shrunk_, pol.chain_, pol.gate_prob_) {
      engine_.begin_run();
    }

    void reset() { engine_.begin_run(); }

    /// Online decision for element e with realized value v. `rng` drives the
    /// quantile tie-break and the down-sample gate.
    bool arrive(int e, double v, SubstreamRng& rng) {
      const auto& q = pol_.quantiles_[e];
      bool active = v > q.threshold ||
                    (v == q.threshold && q.tie_accept_prob > 0.0 &&
                     rng.bernoulli(q.tie_accept_prob));
      if (!active) return false;
      if (!rng.bernoulli(pol_.gate_prob_)) return false;
      return engine_.arrive_kept(e);
    }

    const ElementSubset& accepted() const { return engine_.accepted(); }

   private:
    const OcrsProphetPolicy& pol_;
    OcrsEngine engine_;
  };

 private:
  MatroidPtr matroid_;
  MarginalVector marginals_;  // certified point of the matroid polytope
  MarginalVector shrunk_;     // marginals_ scaled by b, drives the chain
  std::vector<DiscreteDistribution::Quantile> quantiles_;
  ChainDecomposition chain_;
  double applied_scale_ = 1.0;
  double gate_prob_ = 1.0;
};

/// Gambler strategies for a prophet instance.
struct GamblerPolicy {
  enum class Kind { kAcceptAllFeasible, kGreedyThreshold, kOcrsReduction };

  Kind kind = Kind::kAcceptAllFeasible;
  double threshold = 0.0;  // for kGreedyThreshold
  std::shared_ptr<const OcrsProphetPolicy> ocrs;  // for kOcrsReduction

  static GamblerPolicy accept_all_feasible() { return {}; }
  static GamblerPolicy greedy_threshold(double t) {
    return {Kind::kGreedyThreshold, t, nullptr};
  }
  static GamblerPolicy ocrs_reduction(
      std::shared_ptr<const OcrsProphetPolicy> pol) {
    if (!pol) throw InputError("GamblerPolicy: missing OCRS policy");
    return {Kind::kOcrsReduction, 0.0, std::move(pol)};
  }
};

struct GamblerRun {
  double value = 0.0;
  ElementSubset accepted;
};

/// One online pass of the gambler over a fixed value realization. `rng`
/// drives only policy randomness (quantile tie-breaks and the OCRS gate).
inline GamblerRun run_gambler(const ProphetInstance& inst,
                              const GamblerPolicy& policy,
                              const std::vector<double>& values,
                              SubstreamRng& rng) {
  inst.validate();
  if (static_cast<int>(values.size()) != inst.size())
    throw InputError("run_gambler: value vector dimension mismatch");
  const Matroid& m = *inst.matroid;
  GamblerRun run;
  detail::IncrementalIndependence inc(m);

  std::unique_ptr<OcrsProphetPolicy::Run> ocrs_run;
  if (policy.kind == GamblerPolicy::Kind::kOcrsReduction)
    ocrs_run = std::make_unique<OcrsProphetPolicy::Run>(*policy.ocrs);

  for (int e : inst.order) {
    switch (policy.kind) {
      case GamblerPolicy::Kind::kAcceptAllFeasible:
        if (values[e] > 0.0 && inc.try_insert(e)) run.value += values[e];
        break;
      case GamblerPolicy::Kind::kGreedyThreshold:
        if (values[e] >= policy.threshold && inc.try_insert(e))
          run.value += values[e];
        break;
      case GamblerPolicy::Kind::kOcrsReduction:
        if (ocrs_run->arrive(e, values[e], rng)) run.value += values[e];
        break;
    }
  }
  run.accepted = policy.kind == GamblerPolicy::Kind::kOcrsReduction
                     ? ocrs_run->accepted()
                     : inc.set();
  if (m.rank(run.accepted) != run.accepted.count())
    throw InvariantError("run_gambler: accepted set is dependent");
  return run;
}

struct RatioReport {
  double alg_mean = 0.0;
  double alg_half_width = 0.0;
  double opt_mean = 0.0;
  double opt_half_width = 0.0;
  double ratio = 0.0;
  double ratio_half_width = 0.0;
  int64_t trials = 0;
};

struct RatioConfig {
  int64_t trials = 10000;
  uint64_t master_seed = 0;
  int threads = 1;
  int64_t chunk_size = 256;
  std::string module_tag = "prophet-ratio";
};

/// Estimates E[ALG]/E[OPT] over shared value realizations. Per-chunk
/// accumulators are folded in chunk order, so the result does not depend on
/// the thread count.
inline RatioReport measure_ratio(const ProphetInstance& inst,
                                 const GamblerPolicy& policy,
                                 const RatioConfig& cfg) {
  inst.validate();
  int64_t num_chunks = (cfg.trials + cfg.chunk_size - 1) / cfg.chunk_size;
  std::vector<RunningMean> alg_chunks(num_chunks), opt_chunks(num_chunks);
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
      alg_chunks[chunk].add(run_gambler(inst, policy, values, pr).value);
      opt_chunks[chunk].add(offline_opt(*inst.matroid, values).value);
    }
  });
  RunningMean alg, opt;
  for (int64_t c = 0; c < num_chunks; ++c) {
    alg.merge(alg_chunks[c]);
    opt.merge(opt_chunks[c]);
  }
  RatioReport report;
  report.trials = cfg.trials;
  report.alg_mean = alg.mean();
  report.alg_half_width = alg.ci95_half_width();
  report.opt_mean = opt.mean();
  report.opt_half_width = opt.ci95_half_width();
  RatioEstimate ratio{alg.mean(), report.alg_half_width, opt.mean(),
                      report.opt_half_width};
  report.ratio = ratio.ratio();
  report.ratio_half_width = ratio.ci_half_width();
  return report;
}

}  // namespace ocrslab
