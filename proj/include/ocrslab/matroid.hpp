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
#include <memory>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "ocrslab/errors.hpp"
#include "ocrslab/subset.hpp"

namespace ocrslab {

/// A matroid given purely by its rank oracle. Independence, span and girth are
/// derived, never stored. Oracles are immutable after construction and safe
/// for concurrent read-only use.
class Matroid {
 public:
  explicit Matroid(GroundSet ground) : ground_(std::move(ground)) {}
  virtual ~Matroid() = default;

  const GroundSet& ground() const { return ground_; }
  int size() const { return ground_.size; }

  int rank(const ElementSubset& s) const {
    if (s.universe_size() != ground_.size)
      throw InputError("Matroid::rank: subset universe does not match ground");
    return rank_impl(s);
  }

  /// rank(s + e). Subclasses may override with a cheaper path.
  virtual int rank_with(const ElementSubset& s, int e) const {
    if (s.contains(e)) return rank(s);
    ElementSubset t = s;
    t.insert(e);
    return rank(t);
  }

  bool independent(const ElementSubset& s) const {
    return rank(s) == s.count();
  }

  /// True iff adding e does not raise the rank of s. Elements of s span
  /// themselves.
  bool in_span(const ElementSubset& s, int e) const {
    if (s.contains(e)) return true;
    return rank_with(s, e) == rank(s);
  }

  /// { e : rank(s) = rank(s + e) }. Always a superset of s (minus loops is
  /// not taken: loops are in every span).
  ElementSubset span(const ElementSubset& s) const {
    int rs = rank(s);
    ElementSubset out(size());
    for (int e = 0; e < size(); ++e) {
      if (s.contains(e) || rank_with(s, e) == rs) out.insert(e);
    }
    return out;
  }

  int rank_full() const { return rank(ElementSubset::full(size())); }

 protected:
  virtual int rank_impl(const ElementSubset& s) const = 0;

 private:
  GroundSet ground_;
};

using MatroidPtr = std::shared_ptr<const Matroid>;

/// rank(S) = min(k, |S|).
class UniformMatroid : public Matroid {
 public:
  UniformMatroid(int n, int k) : Matroid(GroundSet(n)), k_(k) {
    if (k < 0) throw InputError("UniformMatroid: negative k");
  }
  int cap() const { return k_; }

  int rank_with(const ElementSubset& s, int e) const override {
    int c = s.count() + (s.contains(e) ? 0 : 1);
    return std::min(k_, c);
  }

 protected:
  int rank_impl(const ElementSubset& s) const override {
    return std::min(k_, s.count());
  }

 private:
  int k_;
};

/// Forests of an undirected multigraph. Ground elements are the edges, in the
/// order given. Self-loops are matroid loops.
class GraphicMatroid : public Matroid {
 public:
  GraphicMatroid(int num_vertices, std::vector<std::pair<int, int>> edges)
      : Matroid(GroundSet(static_cast<int>(edges.size()))),
        num_vertices_(num_vertices),
        edges_(std::move(edges)) {
    if (num_vertices < 0) throw InputError("GraphicMatroid: negative vertices");
    for (auto [u, v] : edges_) {
      if (u < 0 || v < 0 || u >= num_vertices_ || v >= num_vertices_)
        throw InputError("GraphicMatroid: edge endpoint out of range");
    }
  }

  int num_vertices() const { return num_vertices_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

 protected:
  int rank_impl(const ElementSubset& s) const override {
    // Union-find over endpoints; rank = number of merges. The arrays are
    // thread-local and epoch-stamped so the hot path never allocates.
    thread_local std::vector<int> parent;
    thread_local std::vector<uint64_t> stamp;
    thread_local uint64_t epoch = 0;
    if (static_cast<int>(parent.size()) < num_vertices_) {
      parent.resize(num_vertices_);
      stamp.resize(num_vertices_, 0);
    }
    ++epoch;
    auto ensure = [&](int y) {
      if (stamp[y] != epoch) {
        stamp[y] = epoch;
        parent[y] = y;
      }
    };
    auto find = [&](int x) {
      ensure(x);
      while (parent[x] != x) {
        ensure(parent[x]);
        parent[x] = parent[parent[x]];
        x = parent[x];
      }
      return x;
    };
    int r = 0;
    s.for_each([&](int idx) {
      auto [u, v] = edges_[idx];
      int ru = find(u), rv = find(v);
      if (ru != rv) {
        parent[ru] = rv;
        ++r;
      }
    });
    return r;
  }

 private:
  int num_vertices_;
  std::vector<std::pair<int, int>> edges_;
};

/// Direct sum of uniform matroids over a partition of the ground set.
class PartitionMatroid : public Matroid {
 public:
  PartitionMatroid(int n, std::vector<std::vector<int>> blocks,
                   std::vector<int> capacities)
      : Matroid(GroundSet(n)),
        blocks_(std::move(blocks)),
        capacities_(std::move(capacities)),
        block_of_(n, -1) {
    if (blocks_.size() != capacities_.size())
      throw InputError("PartitionMatroid: one capacity per block required");
    for (size_t b = 0; b < blocks_.size(); ++b) {
      if (capacities_[b] < 0)
        throw InputError("PartitionMatroid: negative capacity");
      for (int e : blocks_[b]) {
        if (e < 0 || e >= n)
          throw InputError("PartitionMatroid: element out of range");
        if (block_of_[e] != -1)
          throw InputError("PartitionMatroid: element in two blocks");
        block_of_[e] = static_cast<int>(b);
      }
    }
    for (int e = 0; e < n; ++e)
      if (block_of_[e] == -1)
        throw InputError("PartitionMatroid: element not covered by any block");
  }

  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  const std::vector<int>& capacities() const { return capacities_; }
  int block_of(int e) const { return block_of_[e]; }

 protected:
  int rank_impl(const ElementSubset& s) const override {
    std::vector<int> counts(blocks_.size(), 0);
    s.for_each([&](int e) { ++counts[block_of_[e]]; });
    int r = 0;
    for (size_t b = 0; b < blocks_.size(); ++b)
      r += std::min(capacities_[b], counts[b]);
    return r;
  }

 private:
  std::vector<std::vector<int>> blocks_;
  std::vector<int> capacities_;
  std::vector<int> block_of_;
};

/// Matroid defined by an explicit family of independent sets. The family is
/// normalized at construction: deduplicated and closed downward. Guarded to
/// small ground sets since the rank table is precomputed over all subsets.
class ExplicitMatroid : public Matroid {
 public:
  static constexpr int kMaxGround = 20;

  ExplicitMatroid(int n, const std::vector<ElementSubset>& independent_sets)
      : Matroid(GroundSet(n)) {
    if (n > kMaxGround)
      throw CapabilityError("ExplicitMatroid: ground set larger than guard");
    size_t total = size_t{1} << n;
    std::vector<char> indep(total, 0);
    indep[0] = 1;
    for (const auto& s : independent_sets) {
      if (s.universe_size() != n)
        throw InputError("ExplicitMatroid: independent set universe mismatch");
      indep[s.low_mask()] = 1;
    }
    // Downward closure.
    for (uint64_t mask = total; mask-- > 0;) {
      if (!indep[mask]) continue;
      uint64_t m = mask;
      while (m) {
        uint64_t bit = m & (~m + 1);
        indep[mask ^ bit] = 1;
        m ^= bit;
      }
    }
    indep_ = std::move(indep);
    // Rank table: rank[S] = |S| if independent, else max over one removal.
    rank_table_.assign(total, 0);
    for (uint64_t mask = 1; mask < total; ++mask) {
      if (indep_[mask]) {
        rank_table_[mask] = std::popcount(mask);
      } else {
        int best = 0;
        uint64_t m = mask;
        while (m) {
          uint64_t bit = m & (~m + 1);
          best = std::max(best, rank_table_[mask ^ bit]);
          m ^= bit;
        }
        rank_table_[mask] = best;
      }
    }
  }

  bool independent_mask(uint64_t mask) const { return indep_[mask] != 0; }

  /// The normalized family, sorted by mask. Used by serialization.
  std::vector<ElementSubset> independent_sets() const {
    std::vector<ElementSubset> out;
    for (uint64_t mask = 0; mask < indep_.size(); ++mask)
      if (indep_[mask]) out.push_back(ElementSubset::from_mask(size(), mask));
    return out;
  }

  /// Checks the exchange axiom over the stored family. Throws on violation.
  void validate_axioms() const {
    size_t total = indep_.size();
    for (uint64_t a = 0; a < total; ++a) {
      if (!indep_[a]) continue;
      for (uint64_t b = 0; b < total; ++b) {
        if (!indep_[b] || std::popcount(a) <= std::popcount(b)) continue;
        uint64_t diff = a & ~b;
        bool found = false;
        uint64_t m = diff;
        while (m && !found) {
          uint64_t bit = m & (~m + 1);
          if (indep_[b | bit]) found = true;
          m ^= bit;
        }
        if (!found)
          throw InvariantError("ExplicitMatroid: exchange axiom violated");
      }
    }
  }

 protected:
  int rank_impl(const ElementSubset& s) const override {
    return rank_table_[s.low_mask()];
  }

 private:
  std::vector<char> indep_;
  std::vector<int> rank_table_;
};

/// Restriction of a parent matroid to a domain. Keeps the parent's index
/// space; rank(S) = parent.rank(S intersect domain).
class RestrictionMatroid : public Matroid {
 public:
  RestrictionMatroid(MatroidPtr parent, ElementSubset domain)
      : Matroid(parent->ground()),
        parent_(std::move(parent)),
        domain_(std::move(domain)) {
    if (domain_.universe_size() != size())
      throw InputError("RestrictionMatroid: domain universe mismatch");
  }

  const MatroidPtr& parent() const { return parent_; }
  const ElementSubset& domain() const { return domain_; }

 protected:
  int rank_impl(const ElementSubset& s) const override {
    return parent_->rank(s & domain_);
  }

 private:
  MatroidPtr parent_;
  ElementSubset domain_;
};

}  // namespace ocrslab
