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

#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ocrslab/errors.hpp"

namespace ocrslab {

/// A finite ground set. Elements are the dense indices 0..size-1; labels are
/// optional display names.
struct GroundSet {
  int size = 0;
  std::vector<std::string> labels;  // empty, or one per element

  GroundSet() = default;
  explicit GroundSet(int n) : size(n) {
    if (n < 0) throw InputError("GroundSet: negative size");
  }
  GroundSet(int n, std::vector<std::string> names)
      : size(n), labels(std::move(names)) {
    if (n < 0) throw InputError("GroundSet: negative size");
    if (!labels.empty() && static_cast<int>(labels.size()) != n)
      throw InputError("GroundSet: label count does not match size");
  }

  bool operator==(const GroundSet& other) const {
    return size == other.size && labels == other.labels;
  }
};

/// A subset of a ground set, stored as a packed bitset. O(1) membership,
/// iteration in index order.
class ElementSubset {
 public:
  ElementSubset() = default;
  explicit ElementSubset(int universe)
      : universe_(universe), words_((universe + 63) / 64, 0) {
    if (universe < 0) throw InputError("ElementSubset: negative universe");
  }
  ElementSubset(int universe, std::initializer_list<int> elems)
      : ElementSubset(universe) {
    for (int e : elems) insert(e);
  }

  int universe_size() const { return universe_; }

  bool contains(int e) const {
    check_index(e);
    return (words_[e >> 6] >> (e & 63)) & 1u;
  }

  void insert(int e) {
    check_index(e);
    words_[e >> 6] |= uint64_t{1} << (e & 63);
  }

  void erase(int e) {
    check_index(e);
    words_[e >> 6] &= ~(uint64_t{1} << (e & 63));
  }

  void flip(int e) {
    check_index(e);
    words_[e >> 6] ^= uint64_t{1} << (e & 63);
  }

  void clear() {
    for (auto& w : words_) w = 0;
  }

  int count() const {
    int c = 0;
    for (uint64_t w : words_) c += std::popcount(w);
    return c;
  }

  bool empty() const {
    for (uint64_t w : words_)
      if (w) return false;
    return true;
  }

  bool is_subset_of(const ElementSubset& other) const {
    check_same_universe(other);
    for (size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~other.words_[i]) return false;
    return true;
  }

  ElementSubset& operator|=(const ElementSubset& other) {
    check_same_universe(other);
    for (size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
  }
  ElementSubset& operator&=(const ElementSubset& other) {
    check_same_universe(other);
    for (size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
    return *this;
  }
  ElementSubset& operator-=(const ElementSubset& other) {
    check_same_universe(other);
    for (size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
    return *this;
  }

  friend ElementSubset operator|(ElementSubset a, const ElementSubset& b) {
    a |= b;
    return a;
  }
  friend ElementSubset operator&(ElementSubset a, const ElementSubset& b) {
    a &= b;
    return a;
  }
  friend ElementSubset operator-(ElementSubset a, const ElementSubset& b) {
    a -= b;
    return a;
  }

  bool operator==(const ElementSubset& other) const {
    return universe_ == other.universe_ && words_ == other.words_;
  }
  bool operator!=(const ElementSubset& other) const {
    return !(*this == other);
  }

  /// Calls fn(e) for every member, in increasing index order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (size_t i = 0; i < words_.size(); ++i) {
      uint64_t w = words_[i];
      while (w) {
        int bit = std::countr_zero(w);
        fn(static_cast<int>(i * 64 + bit));
        w &= w - 1;
      }
    }
  }

  std::vector<int> to_indices() const {
    std::vector<int> out;
    out.reserve(count());
    for_each([&](int e) { out.push_back(e); });
    return out;
  }

  static ElementSubset from_indices(int universe,
                                    const std::vector<int>& elems) {
    ElementSubset s(universe);
    for (int e : elems) s.insert(e);
    return s;
  }

  static ElementSubset full(int universe) {
    ElementSubset s(universe);
    for (size_t i = 0; i < s.words_.size(); ++i) s.words_[i] = ~uint64_t{0};
    int tail = universe & 63;
    if (tail != 0 && !s.words_.empty())
      s.words_.back() &= (uint64_t{1} << tail) - 1;
    return s;
  }

  /// Interprets the low bits of `mask` as membership of elements 0..universe-1.
  /// Only valid for universes of at most 64 elements.
  static ElementSubset from_mask(int universe, uint64_t mask) {
    if (universe > 64)
      throw InputError("ElementSubset::from_mask: universe too large");
    ElementSubset s(universe);
    if (!s.words_.empty()) s.words_[0] = mask;
    return s;
  }

  uint64_t low_mask() const { return words_.empty() ? 0 : words_[0]; }

  const std::vector<uint64_t>& words() const { return words_; }

  /// Canonical encoding, usable as a memoization key.
  size_t hash() const {
    // FNV-1a over the words.
    uint64_t h = 0xcbf29ce484222325ull;
    for (uint64_t w : words_) {
      for (int i = 0; i < 8; ++i) {
        h ^= (w >> (8 * i)) & 0xff;
        h *= 0x100000001b3ull;
      }
    }
    return static_cast<size_t>(h);
  }

 private:
  void check_index(int e) const {
    if (e < 0 || e >= universe_)
      throw InputError("ElementSubset: index " + std::to_string(e) +
                       " out of range for universe of size " +
                       std::to_string(universe_));
  }
  void check_same_universe(const ElementSubset& other) const {
    if (universe_ != other.universe_)
      throw InputError("ElementSubset: universe size mismatch");
  }

  int universe_ = 0;
  std::vector<uint64_t> words_;
};

struct ElementSubsetHash {
  size_t operator()(const ElementSubset& s) const { return s.hash(); }
};

}  // namespace ocrslab
