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

#include <deque>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "ocrslab/matroid.hpp"

namespace ocrslab {

/// Maximum subset of `s` partitionable into independent sets, one per matroid
/// in `bases` (Edmonds' matroid partition, shortest augmenting paths in the
/// exchange graph). Returns the parts; elements of `s` not covered by any
/// part are spanned in the union.
inline std::vector<ElementSubset> matroid_partition(
    const std::vector<const Matroid*>& bases, const ElementSubset& s) {
  if (bases.empty()) throw InputError("matroid_partition: no base matroids");
  int n = bases.front()->size();
  for (const auto* m : bases)
    if (m->size() != n)
      throw InputError("matroid_partition: mismatched ground sets");
  int k = static_cast<int>(bases.size());

  std::vector<ElementSubset> parts(k, ElementSubset(n));
  std::vector<int> part_of(n, -1);

  auto fits = [&](int j, int x) {
    return bases[j]->rank_with(parts[j], x) == parts[j].count() + 1;
  };
  auto swap_fits = [&](int j, int y, int x) {
    ElementSubset t = parts[j];
    t.erase(y);
    t.insert(x);
    return bases[j]->rank(t) == t.count();
  };

  auto try_insert = [&](int e) {
    // BFS from e over exchange arcs x -> y (y in I_j, I_j - y + x indep).
    std::vector<int> prev(n, -1);
    std::vector<char> visited(n, 0);
    visited[e] = 1;
    std::deque<int> queue{e};
    int sink_elem = -1, sink_part = -1;
    while (!queue.empty() && sink_elem == -1) {
      int x = queue.front();
      queue.pop_front();
      for (int j = 0; j < k && sink_elem == -1; ++j) {
        if (parts[j].contains(x)) continue;
        if (fits(j, x)) {
          sink_elem = x;
          sink_part = j;
          break;
        }
        parts[j].for_each([&](int y) {
          if (visited[y]) return;
          if (swap_fits(j, y, x)) {
            visited[y] = 1;
            prev[y] = x;
            queue.push_back(y);
          }
        });
      }
    }
    if (sink_elem == -1) return false;
    // Shift along the path: sink moves into its new part, each predecessor
    // takes the vacated slot.
    int y = sink_elem;
    int dest = sink_part;
    while (true) {
      int old_part = part_of[y];
      parts[dest].insert(y);
      if (old_part != -1) parts[old_part].erase(y);
      part_of[y] = dest;
      if (y == e) break;
      dest = old_part;
      y = prev[y];
    }
    return true;
  };

  s.for_each([&](int e) { try_insert(e); });
  return parts;
}

/// Rank of the union of the given matroids at `s`: the size of the largest
/// subset of `s` partitionable into per-matroid independent sets.
inline int union_rank(const std::vector<const Matroid*>& bases,
                      const ElementSubset& s) {
  auto parts = matroid_partition(bases, s);
  int r = 0;
  for (const auto& p : parts) r += p.count();
  return r;
}

/// Matroid union of a list of matroids over one ground set.
class UnionMatroid : public Matroid {
 public:
  explicit UnionMatroid(std::vector<MatroidPtr> bases)
      : Matroid(check_and_ground(bases)), bases_(std::move(bases)) {
    for (const auto& b : bases_) raw_.push_back(b.get());
  }

  const std::vector<MatroidPtr>& bases() const { return bases_; }

 protected:
  int rank_impl(const ElementSubset& s) const override {
    return union_rank(raw_, s);
  }

 private:
  static GroundSet check_and_ground(const std::vector<MatroidPtr>& bases) {
    if (bases.empty()) throw InputError("UnionMatroid: no base matroids");
    for (const auto& b : bases)
      if (b->size() != bases.front()->size())
        throw InputError("UnionMatroid: mismatched ground sets");
    return bases.front()->ground();
  }

  std::vector<MatroidPtr> bases_;
  std::vector<const Matroid*> raw_;
};

/// k-fold union of a single matroid: sets partitionable into at most k
/// independent sets.
inline MatroidPtr kfold_union(const MatroidPtr& base, int k) {
  if (k < 1) throw InputError("kfold_union: k must be >= 1");
  return std::make_shared<UnionMatroid>(
      std::vector<MatroidPtr>(static_cast<size_t>(k), base));
}

/// Base matroid with each element replaced by k parallel copies, laid out
/// base-major: copy i of element e has index e*k + (i-1). rank(S) equals the
/// base rank of the set of represented base elements.
class ParallelCopyMatroid : public Matroid {
 public:
  ParallelCopyMatroid(MatroidPtr base, int k)
      : Matroid(GroundSet(base->size() * k)), base_(std::move(base)), k_(k) {
    if (k < 1) throw InputError("ParallelCopyMatroid: k must be >= 1");
  }

  const MatroidPtr& base() const { return base_; }
  int fold() const { return k_; }

 protected:
  int rank_impl(const ElementSubset& s) const override {
    ElementSubset support(base_->size());
    s.for_each([&](int idx) { support.insert(idx / k_); });
    return base_->rank(support);
  }

 private:
  MatroidPtr base_;
  int k_;
};

/// The extended k-fold union: the k-fold union of the parallel-copy matroid.
/// Ground set is E x [k] in the base-major layout, so the restriction to
/// E x {1} is the index set {e*k : e in E}.
///
/// Uniform and partition bases use closed-form ranks; everything else goes
/// through matroid_partition with an internally synchronized memo.
class ExtendedKFoldUnion : public Matroid {
 public:
  ExtendedKFoldUnion(MatroidPtr base, int k)
      : Matroid(GroundSet(base->size() * k)),
        base_(std::move(base)),
        k_(k),
        copies_(std::make_shared<ParallelCopyMatroid>(base_, k)) {
    if (k < 1) throw InputError("ExtendedKFoldUnion: k must be >= 1");
    if (const auto* u = dynamic_cast<const UniformMatroid*>(base_.get())) {
      uniform_cap_ = std::min(u->cap(), u->size());
    } else if (const auto* p =
                   dynamic_cast<const PartitionMatroid*>(base_.get())) {
      partition_ = p;
    }
    for (int j = 0; j < k_; ++j) raw_copies_.push_back(copies_.get());
  }

  const MatroidPtr& base() const { return base_; }
  int fold() const { return k_; }
  int base_size() const { return base_->size(); }

  /// Index of copy i (1-based) of base element e.
  int copy_index(int e, int i) const { return e * k_ + (i - 1); }
  int base_of(int idx) const { return idx / k_; }
  int copy_of(int idx) const { return idx % k_ + 1; }

  /// {e} x [k] as a subset of the extended ground set.
  ElementSubset copy_group(int e) const {
    ElementSubset g(size());
    for (int i = 1; i <= k_; ++i) g.insert(copy_index(e, i));
    return g;
  }

  /// True iff s is a union of full copy-groups.
  bool is_copy_group_union(const ElementSubset& s) const {
    for (int e = 0; e < base_size(); ++e) {
      int c = 0;
      for (int i = 1; i <= k_; ++i)
        if (s.contains(copy_index(e, i))) ++c;
      if (c != 0 && c != k_) return false;
    }
    return true;
  }

  /// occ_e(S) = k - rank(S + {e} x [k]) + rank(S).
  int occupancy(int base_element, const ElementSubset& s) const {
    if (base_element < 0 || base_element >= base_size())
      throw InputError("occupancy: base element out of range");
    ElementSubset with = s;
    for (int i = 1; i <= k_; ++i) with.insert(copy_index(base_element, i));
    return k_ - rank(with) + rank(s);
  }

  bool has_closed_form() const {
    return uniform_cap_ >= 0 || partition_ != nullptr;
  }

 protected:
  int rank_impl(const ElementSubset& s) const override {
    if (uniform_cap_ >= 0)
      return std::min(k_ * uniform_cap_, s.count());
    if (partition_ != nullptr) {
      std::vector<int> counts(partition_->blocks().size(), 0);
      s.for_each([&](int idx) { ++counts[partition_->block_of(idx / k_)]; });
      int r = 0;
      for (size_t b = 0; b < counts.size(); ++b)
        r += std::min(k_ * partition_->capacities()[b], counts[b]);
      return r;
    }
    {
      std::lock_guard<std::mutex> lock(memo_mutex_);
      auto it = memo_.find(s);
      if (it != memo_.end()) return it->second;
    }
    int r = union_rank(raw_copies_, s);
    {
      std::lock_guard<std::mutex> lock(memo_mutex_);
      if (memo_.size() < kMemoCap) memo_.emplace(s, r);
    }
    return r;
  }

 private:
  static constexpr size_t kMemoCap = 1 << 22;

  MatroidPtr base_;
  int k_;
  std::shared_ptr<ParallelCopyMatroid> copies_;
  std::vector<const Matroid*> raw_copies_;
  int uniform_cap_ = -1;
  const PartitionMatroid* partition_ = nullptr;

  mutable std::mutex memo_mutex_;
  mutable std::unordered_map<ElementSubset, int, ElementSubsetHash> memo_;
};

using ExtendedPtr = std::shared_ptr<const ExtendedKFoldUnion>;

inline ExtendedPtr extend_kfold(const MatroidPtr& base, int k) {
  return std::make_shared<ExtendedKFoldUnion>(base, k);
}

/// The occupancy function of one element, as a callable value.
struct OccupancyFunction {
  ExtendedPtr matroid;
  int element = 0;

  int k() const { return matroid->fold(); }
  int operator()(const ElementSubset& s) const {
    return matroid->occupancy(element, s);
  }
};

}  // namespace ocrslab
