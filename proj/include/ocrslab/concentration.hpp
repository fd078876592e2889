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
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ocrslab/errors.hpp"
#include "ocrslab/matroid_union.hpp"
#include "ocrslab/parallel.hpp"
#include "ocrslab/rng.hpp"
#include "ocrslab/stats.hpp"
#include "ocrslab/subset.hpp"

namespace ocrslab {

/// Product Bernoulli distribution over {0,1}^n.
struct BernoulliVector {
  std::vector<double> p;

  int size() const { return static_cast<int>(p.size()); }

  void validate() const {
    if (p.empty()) throw InputError("BernoulliVector: empty");
    for (double v : p)
      if (!(v >= 0.0 && v <= 1.0))
        throw InputError("BernoulliVector: probability out of [0,1]");
  }

  bool iid() const {
    for (double v : p)
      if (v != p.front()) return false;
    return true;
  }

  static BernoulliVector uniform(int n, double prob) {
    BernoulliVector b;
    b.p.assign(n, prob);
    b.validate();
    return b;
  }

  /// The exponentially down-scaled vector X^(s): each probability becomes
  /// e^{-s} p_e.
  BernoulliVector scaled(double s) const {
    if (s < 0.0) throw InputError("BernoulliVector::scaled: s must be >= 0");
    BernoulliVector out = *this;
    double factor = std::exp(-s);
    for (double& v : out.p) v *= factor;
    return out;
  }

  ElementSubset sample(SubstreamRng& rng) const {
    ElementSubset x(size());
    for (int e = 0; e < size(); ++e)
      if (p[e] > 0.0 && rng.bernoulli(p[e])) x.insert(e);
    return x;
  }
};

/// A nonnegative monotone 1-Lipschitz set function on {0,1}^n, given by a
/// generic evaluator and, when the value depends only on |X|, an optional
/// count form enabling binomial sampling under iid coordinates.
struct MonotoneLipschitzFunction {
  std::string name;
  int dimension = 0;
  double range = 0.0;  // values lie in [0, range]
  std::function<double(const ElementSubset&)> eval;
  std::function<double(int64_t)> count_form;  // null when not count-based

  bool has_count_form() const { return static_cast<bool>(count_form); }

  double operator()(const ElementSubset& x) const { return eval(x); }

  /// f(X) = min(k, |X|).
  static MonotoneLipschitzFunction capped_sum(int n, int k) {
    if (n < 1 || k < 0) throw InputError("capped_sum: bad parameters");
    MonotoneLipschitzFunction f;
    f.name = "capped-sum-" + std::to_string(k);
    f.dimension = n;
    f.range = static_cast<double>(std::min(n, k));
    f.count_form = [k](int64_t c) {
      return static_cast<double>(std::min<int64_t>(k, c));
    };
    f.eval = [cf = f.count_form](const ElementSubset& x) {
      return cf(x.count());
    };
    return f;
  }

  /// f(X) = max_e X_e = 1{X nonempty}.
  static MonotoneLipschitzFunction coordinate_max(int n) {
    if (n < 1) throw InputError("coordinate_max: bad dimension");
    MonotoneLipschitzFunction f;
    f.name = "coordinate-max";
    f.dimension = n;
    f.range = 1.0;
    f.count_form = [](int64_t c) { return c > 0 ? 1.0 : 0.0; };
    f.eval = [](const ElementSubset& x) { return x.empty() ? 0.0 : 1.0; };
    return f;
  }

  /// f(X) = rank(X) in the given matroid (unit-weight matroid rank).
  static MonotoneLipschitzFunction matroid_rank(MatroidPtr m) {
    if (!m) throw InputError("matroid_rank: missing matroid");
    MonotoneLipschitzFunction f;
    f.name = "matroid-rank";
    f.dimension = m->size();
    f.range = static_cast<double>(m->rank_full());
    f.eval = [m = std::move(m)](const ElementSubset& x) {
      return static_cast<double>(m->rank(x));
    };
    return f;
  }

  /// f(X) = occ_e(X ∪ shift) for an extended k-fold union: the occupancy of
  /// one element above a fixed protected set.
  static MonotoneLipschitzFunction occupancy(ExtendedPtr mk, int element,
                                             ElementSubset shift) {
    if (!mk) throw InputError("occupancy function: missing matroid");
    if (element < 0 || element >= mk->base_size())
      throw InputError("occupancy function: element out of range");
    MonotoneLipschitzFunction f;
    f.name = "occupancy-" + std::to_string(element);
    f.dimension = mk->size();
    f.range = static_cast<double>(mk->fold());
    f.eval = [mk = std::move(mk), element,
              shift = std::move(shift)](const ElementSubset& x) {
      return static_cast<double>(mk->occupancy(element, x | shift));
    };
    return f;
  }

  /// Occupancy of one element in the extended k-fold union of the n-uniform
  /// matroid on 2n elements (a kn-uniform matroid on 2kn elements), as an
  /// explicit count form: occ(X) = clamp(|X| - (kn - k), 0, k).
  static MonotoneLipschitzFunction uniform_occupancy(int n, int k) {
    if (n < 1 || k < 1) throw InputError("uniform_occupancy: bad parameters");
    MonotoneLipschitzFunction f;
    f.name = "uniform-occupancy";
    f.dimension = 2 * k * n;
    f.range = static_cast<double>(k);
    int64_t knee = static_cast<int64_t>(k) * n - k;
    f.count_form = [k, knee](int64_t c) {
      return static_cast<double>(
          std::clamp<int64_t>(c - knee, 0, k));
    };
    f.eval = [cf = f.count_form](const ElementSubset& x) {
      return cf(x.count());
    };
    return f;
  }
};

/// Randomized sanity check of monotonicity and the 1-Lipschitz property:
/// random pairs X ⊆ Y and random single-bit flips. Returns the number of
/// violations found (0 expected).
inline int spot_check_monotone_lipschitz(const MonotoneLipschitzFunction& f,
                                         int trials, SubstreamRng& rng) {
  int violations = 0;
  int n = f.dimension;
  for (int t = 0; t < trials; ++t) {
    ElementSubset x(n), y(n);
    for (int e = 0; e < n; ++e) {
      bool in_x = rng.bernoulli(0.5);
      if (in_x) x.insert(e);
      if (in_x || rng.bernoulli(0.5)) y.insert(e);
    }
    if (f(x) > f(y) + 1e-12) ++violations;
    int e = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
    ElementSubset z = x;
    z.flip(e);
    if (std::fabs(f(z) - f(x)) > 1.0 + 1e-12) ++violations;
  }
  return violations;
}

struct TailEstimate {
  double s = 0.0;
  double t = 0.0;
  double mean = 0.0;  // empirical E[f(X)], unscaled vector
  double mean_half_width = 0.0;
  double threshold = 0.0;  // mean + t
  int64_t exceed_count = 0;
  int64_t trials = 0;
  double tail = 0.0;  // empirical Pr[f(X^(s)) >= threshold]
  WilsonInterval tail_ci;
  double bound = 0.0;  // e^{-st}
};

struct TailConfig {
  int64_t trials = 100000;
  uint64_t master_seed = 0;
  int threads = 1;
  int64_t chunk_size = 4096;
  std::string module_tag = "concentration";
  bool allow_count_fast_path = true;
};

inline double bound_new(double s, double t) {
  if (!(s > 0.0 && s <= 1.0)) throw InputError("bound_new: s out of (0,1]");
  if (!(t > 0.0)) throw InputError("bound_new: t must be positive");
  return std::exp(-s * t);
}

/// Multiplicative Chernoff upper tail for a sum with the given mean:
/// Pr[X >= (1+delta) mu] <= exp(-delta^2 mu / (2 + delta)).
inline double bound_chernoff(double mean, double delta) {
  if (mean < 0.0 || delta < 0.0) throw InputError("bound_chernoff: bad args");
  return std::exp(-delta * delta * mean / (2.0 + delta));
}

/// McDiarmid for n coordinates of unit influence: exp(-2 t^2 / n).
inline double bound_mcdiarmid(int n, double t) {
  if (n < 1 || t < 0.0) throw InputError("bound_mcdiarmid: bad args");
  return std::exp(-2.0 * t * t / n);
}

namespace detail {

/// Mean of f over `trials` draws of the product Bernoulli vector. Uses the
/// binomial count form when available and the vector is iid; chunk sums fold
/// in chunk order either way.
inline RunningMean sample_mean(const MonotoneLipschitzFunction& f,
                               const BernoulliVector& p, const TailConfig& cfg,
                               std::string_view substream) {
  bool fast = cfg.allow_count_fast_path && f.has_count_form() && p.iid();
  int64_t num_chunks = (cfg.trials + cfg.chunk_size - 1) / cfg.chunk_size;
  std::vector<RunningMean> chunks(num_chunks);
  parallel_chunks(num_chunks, std::max(1, cfg.threads),
                  [&](int64_t chunk, int) {
    SubstreamRng rng(cfg.master_seed, cfg.module_tag,
                     static_cast<uint64_t>(chunk), substream);
    int64_t lo = chunk * cfg.chunk_size;
    int64_t hi = std::min<int64_t>(cfg.trials, lo + cfg.chunk_size);
    if (fast) {
      std::binomial_distribution<int64_t> bin(p.size(), p.p.front());
      for (int64_t t = lo; t < hi; ++t)
        chunks[chunk].add(f.count_form(bin(rng.engine())));
    } else {
      for (int64_t t = lo; t < hi; ++t) chunks[chunk].add(f(p.sample(rng)));
    }
  });
  RunningMean total;
  for (auto& c : chunks) total.merge(c);
  return total;
}

/// Count of draws with f >= threshold, same sampling scheme.
inline int64_t sample_exceed_count(const MonotoneLipschitzFunction& f,
                                   const BernoulliVector& p, double threshold,
                                   const TailConfig& cfg,
                                   std::string_view substream) {
  bool fast = cfg.allow_count_fast_path && f.has_count_form() && p.iid();
  int64_t num_chunks = (cfg.trials + cfg.chunk_size - 1) / cfg.chunk_size;
  std::vector<int64_t> chunks(num_chunks, 0);
  parallel_chunks(num_chunks, std::max(1, cfg.threads),
                  [&](int64_t chunk, int) {
    SubstreamRng rng(cfg.master_seed, cfg.module_tag,
                     static_cast<uint64_t>(chunk), substream);
    int64_t lo = chunk * cfg.chunk_size;
    int64_t hi = std::min<int64_t>(cfg.trials, lo + cfg.chunk_size);
    int64_t count = 0;
    if (fast) {
      std::binomial_distribution<int64_t> bin(p.size(), p.p.front());
      for (int64_t t = lo; t < hi; ++t)
        if (f.count_form(bin(rng.engine())) >= threshold) ++count;
    } else {
      for (int64_t t = lo; t < hi; ++t)
        if (f(p.sample(rng)) >= threshold) ++count;
    }
    chunks[chunk] = count;
  });
  int64_t total = 0;
  for (int64_t c : chunks) total += c;
  return total;
}

}  // namespace detail

/// Empirical check of the scaled tail: estimates E[f(X)] on the unscaled
/// vector, then Pr[f(X^(s)) >= E[f(X)] + t] on the scaled one from an
/// independent substream, against the e^{-st} bound.
inline TailEstimate empirical_tail(const MonotoneLipschitzFunction& f,
                                   const BernoulliVector& p, double s,
                                   double t, const TailConfig& cfg) {
  p.validate();
  if (p.size() != f.dimension)
    throw InputError("empirical_tail: dimension mismatch");
  TailEstimate est;
  est.s = s;
  est.t = t;
  est.bound = bound_new(s, t);
  RunningMean mean = detail::sample_mean(f, p, cfg, "mean-phase");
  est.mean = mean.mean();
  est.mean_half_width = mean.ci95_half_width();
  est.threshold = est.mean + t;
  est.trials = cfg.trials;
  est.exceed_count = detail::sample_exceed_count(f, p.scaled(s),
                                                 est.threshold, cfg,
                                                 "tail-phase");
  est.tail = static_cast<double>(est.exceed_count) / cfg.trials;
  est.tail_ci = wilson_interval(est.exceed_count, cfg.trials);
  return est;
}

struct CounterexampleReport {
  int n = 0;
  int k = 0;
  double p = 0.0;            // per-coordinate probability
  double mean = 0.0;         // empirical E[f(X)]
  double mean_half_width = 0.0;
  double mean_bound = 0.0;   // k/2 + o(k), the analytic ceiling on E[f]
  int64_t full_count = 0;    // draws with f(X) = k
  int64_t trials = 0;
  double full_prob = 0.0;    // empirical Pr[f(X) = k]
  WilsonInterval full_ci;
  double exact_full_prob = 0.0;  // Pr[Bin(2kn, p) >= kn] exactly
};

/// The unscaled tail blow-up witness: the occupancy of one element of the
/// extended k-fold union of the n-uniform matroid on 2n elements, under
/// p = 1/2 - 1/(2n). Then |X| ~ Bin(2kn, p) has mean kn - k, so the mean of
/// f stays at most k/2 while f hits its maximum k with constant probability
/// (n >> k). Hence no bound Pr[f >= E f + t] <= e^{-ct} can hold for the
/// unscaled vector with c independent of n. Guarded at n >= 50 k.
inline CounterexampleReport counterexample_unscaled(int n, int k,
                                                    const TailConfig& cfg) {
  if (k < 1 || n < 50 * k)
    throw InputError("counterexample_unscaled: requires n >= 50 k, k >= 1");
  auto f = MonotoneLipschitzFunction::uniform_occupancy(n, k);
  double prob = 0.5 - 1.0 / (2.0 * n);
  BernoulliVector p = BernoulliVector::uniform(f.dimension, prob);

  CounterexampleReport rep;
  rep.n = n;
  rep.k = k;
  rep.p = prob;
  rep.trials = cfg.trials;
  RunningMean mean = detail::sample_mean(f, p, cfg, "cx-mean");
  rep.mean = mean.mean();
  rep.mean_half_width = mean.ci95_half_width();
  rep.mean_bound = k / 2.0;
  // f(X) = k exactly when all kn coordinates are on.
  rep.full_count = detail::sample_exceed_count(
      f, p, static_cast<double>(k), cfg, "cx-tail");
  rep.full_prob = static_cast<double>(rep.full_count) / cfg.trials;
  rep.full_ci = wilson_interval(rep.full_count, cfg.trials);
  rep.exact_full_prob = binomial_upper_tail(
      static_cast<int64_t>(2) * k * n, static_cast<int64_t>(k) * n, prob);
  return rep;
}

}  // namespace ocrslab
