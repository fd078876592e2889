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
#include <limits>
#include <optional>
#include <vector>

#include "ocrslab/matroid.hpp"

namespace ocrslab {

/// Shortest cycle length of an undirected multigraph, or nullopt for a
/// forest. Self-loops count as cycles of length 1, parallel edges as 2;
/// otherwise BFS from every vertex.
inline std::optional<int> graph_girth(
    int num_vertices, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(num_vertices);
  bool has_parallel = false;
  for (auto [u, v] : edges) {
    if (u == v) return 1;
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  // Parallel edge detection.
  for (int u = 0; u < num_vertices; ++u) {
    std::vector<char> seen(num_vertices, 0);
    for (int v : adj[u]) {
      if (seen[v]) {
        has_parallel = true;
        break;
      }
      seen[v] = 1;
    }
    if (has_parallel) break;
  }
  if (has_parallel) return 2;

  int best = std::numeric_limits<int>::max();
  std::vector<int> dist(num_vertices), parent(num_vertices);
  for (int src = 0; src < num_vertices; ++src) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(parent.begin(), parent.end(), -1);
    std::deque<int> queue{src};
    dist[src] = 0;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      if (2 * dist[u] >= best) break;
      for (int v : adj[u]) {
        if (v == parent[u]) {
          parent[u] = -2;  // consume one multiplicity of the tree edge
          continue;
        }
        if (dist[v] == -1) {
          dist[v] = dist[u] + 1;
          parent[v] = u;
          queue.push_back(v);
        } else {
          best = std::min(best, dist[u] + dist[v] + 1);
        }
      }
    }
  }
  if (best == std::numeric_limits<int>::max()) return std::nullopt;
  return best;
}

/// Size of the smallest dependent set; nullopt if the matroid is free.
/// Graphic matroids use the shortest-cycle path with no size guard; anything
/// else falls back to subset enumeration by increasing cardinality, guarded
/// at |E| <= 24.
inline std::optional<int> girth(const Matroid& m) {
  if (const auto* g = dynamic_cast<const GraphicMatroid*>(&m))
    return graph_girth(g->num_vertices(), g->edges());
  if (const auto* u = dynamic_cast<const UniformMatroid*>(&m)) {
    if (u->size() > u->cap()) return u->cap() + 1;
    return std::nullopt;
  }

  int n = m.size();
  if (n > 24)
    throw CapabilityError("girth: generic enumeration guarded at |E| <= 24");
  int full_rank = m.rank_full();
  for (int c = 1; c <= std::min(n, full_rank + 1); ++c) {
    // Enumerate all c-subsets in lexicographic order.
    std::vector<int> idx(c);
    for (int i = 0; i < c; ++i) idx[i] = i;
    while (true) {
      ElementSubset s(n);
      for (int i : idx) s.insert(i);
      if (m.rank(s) < c) return c;
      int i = c - 1;
      while (i >= 0 && idx[i] == n - c + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < c; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return std::nullopt;
}

}  // namespace ocrslab
