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

#include <cstdint>
#include <random>
#include <string_view>

namespace ocrslab {

// Counter-based splittable streams: a substream is keyed by
// (master seed, module tag, trial index, substream tag) and is independent of
// how trials are distributed over threads. Two runs with the same key yield
// the same draws.

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline uint64_t hash_tag(std::string_view tag) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

struct StreamKey {
  uint64_t master_seed = 0;
  uint64_t module_tag = 0;
  uint64_t trial = 0;
  uint64_t substream = 0;

  uint64_t mix() const {
    uint64_t h = splitmix64(master_seed);
    h = splitmix64(h ^ module_tag);
    h = splitmix64(h ^ trial);
    h = splitmix64(h ^ substream);
    return h;
  }
};

/// Engine for one substream. mt19937_64 seeded from the mixed key.
class SubstreamRng {
 public:
  explicit SubstreamRng(const StreamKey& key) : engine_(key.mix()) {}
  SubstreamRng(uint64_t master_seed, std::string_view module_tag,
               uint64_t trial, std::string_view substream_tag)
      : SubstreamRng(StreamKey{master_seed, hash_tag(module_tag), trial,
                               hash_tag(substream_tag)}) {}

  std::mt19937_64& engine() { return engine_; }

  double uniform01() { return unit_(engine_); }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform integer in [0, n).
  uint64_t below(uint64_t n) {
    std::uniform_int_distribution<uint64_t> d(0, n - 1);
    return d(engine_);
  }

  /// Fisher-Yates shuffle, deterministic given the stream state.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace ocrslab
