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
#include <array>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ocrslab/errors.hpp"
#include "ocrslab/girth.hpp"

namespace ocrslab {

struct Graph {
  int num_vertices = 0;
  std::vector<std::pair<int, int>> edges;

  int num_edges() const { return static_cast<int>(edges.size()); }

  void validate() const {
    for (auto [u, v] : edges)
      if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices)
        throw InputError("Graph: edge endpoint out of range");
  }

  std::optional<int> girth() const {
    return graph_girth(num_vertices, edges);
  }
};

/// Cubic graph from LCF notation: a Hamiltonian cycle on n vertices plus a
/// chord from each vertex i to i + jumps[i % jumps.size()] (mod n).
inline Graph lcf_graph(int n, const std::vector<int>& jumps) {
  Graph g;
  g.num_vertices = n;
  std::set<std::pair<int, int>> chords;
  for (int i = 0; i < n; ++i) {
    g.edges.emplace_back(i, (i + 1) % n);
    int j = ((i + jumps[i % jumps.size()]) % n + n) % n;
    chords.insert({std::min(i, j), std::max(i, j)});
  }
  for (auto c : chords) g.edges.push_back(c);
  return g;
}

inline Graph petersen_graph() {
  Graph g;
  g.num_vertices = 10;
  for (int i = 0; i < 5; ++i) {
    g.edges.emplace_back(i, (i + 1) % 5);          // outer pentagon
    g.edges.emplace_back(5 + i, 5 + (i + 2) % 5);  // inner pentagram
    g.edges.emplace_back(i, 5 + i);                // spokes
  }
  return g;
}

/// The (3,6)-cage, 14 vertices and 21 edges.
inline Graph heawood_graph() { return lcf_graph(14, {5, -5}); }

/// The (3,7)-cage, 24 vertices and 36 edges.
inline Graph mcgee_graph() { return lcf_graph(24, {12, 7, -7}); }

inline Graph complete_graph(int n) {
  Graph g;
  g.num_vertices = n;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) g.edges.emplace_back(u, v);
  return g;
}

inline Graph cycle_graph(int n) {
  Graph g;
  g.num_vertices = n;
  for (int i = 0; i < n; ++i) g.edges.emplace_back(i, (i + 1) % n);
  return g;
}

/// Arithmetic in GF(p^m), elements encoded as base-p digit strings of the
/// polynomial coefficients (digit i = coefficient of x^i).
class GaloisField {
 public:
  explicit GaloisField(int q) : q_(q) {
    int p = smallest_prime_factor(q);
    int m = 0;
    for (int t = q; t > 1; t /= p) {
      if (t % p != 0)
        throw InputError("GaloisField: order must be a prime power");
      ++m;
    }
    p_ = p;
    m_ = m;
    irreducible_ = pick_irreducible(p, m);
    build_tables();
  }

  int order() const { return q_; }
  int characteristic() const { return p_; }

  int add(int a, int b) const { return add_[a * q_ + b]; }
  int mul(int a, int b) const { return mul_[a * q_ + b]; }
  int neg(int a) const { return neg_[a]; }

 private:
  static int smallest_prime_factor(int q) {
    if (q < 2) throw InputError("GaloisField: order must be >= 2");
    for (int d = 2; d * d <= q; ++d)
      if (q % d == 0) return d;
    return q;
  }

  // Monic irreducible of degree m over GF(p), coefficients of x^0..x^{m-1}
  // (the x^m coefficient is implicitly 1). Found by brute-force root/factor
  // search over the coefficient space.
  static std::vector<int> pick_irreducible(int p, int m) {
    if (m == 1) return {};
    int total = 1;
    for (int i = 0; i < m; ++i) total *= p;
    for (int code = 0; code < total; ++code) {
      std::vector<int> c(m);
      int t = code;
      for (int i = 0; i < m; ++i) {
        c[i] = t % p;
        t /= p;
      }
      if (c[0] == 0) continue;  // divisible by x
      if (is_irreducible(p, c)) return c;
    }
    throw ConstructionError("GaloisField: no irreducible polynomial found");
  }

  // Degree-m monic poly with low coefficients c is irreducible over GF(p)
  // iff it has no monic factor of degree 1..m/2 (trial division).
  static bool is_irreducible(int p, const std::vector<int>& c) {
    int m = static_cast<int>(c.size());
    std::vector<int> full(c);
    full.push_back(1);
    for (int d = 1; 2 * d <= m; ++d) {
      int total = 1;
      for (int i = 0; i < d; ++i) total *= p;
      for (int code = 0; code < total; ++code) {
        std::vector<int> f(d + 1);
        int t = code;
        for (int i = 0; i < d; ++i) {
          f[i] = t % p;
          t /= p;
        }
        f[d] = 1;
        if (poly_mod_is_zero(p, full, f)) return false;
      }
    }
    return true;
  }

  static bool poly_mod_is_zero(int p, std::vector<int> a,
                               const std::vector<int>& f) {
    int df = static_cast<int>(f.size()) - 1;
    for (int i = static_cast<int>(a.size()) - 1; i >= df; --i) {
      int coef = a[i] % p;
      if (coef == 0) continue;
      // f is monic, so subtract coef * x^{i-df} * f.
      for (int j = 0; j <= df; ++j)
        a[i - df + j] = ((a[i - df + j] - coef * f[j]) % p + p) % p;
    }
    for (int i = 0; i < df; ++i)
      if (a[i] % p != 0) return false;
    return true;
  }

  std::vector<int> digits(int a) const {
    std::vector<int> d(m_);
    for (int i = 0; i < m_; ++i) {
      d[i] = a % p_;
      a /= p_;
    }
    return d;
  }

  int encode(const std::vector<int>& d) const {
    int a = 0;
    for (int i = m_ - 1; i >= 0; --i) a = a * p_ + d[i];
    return a;
  }

  void build_tables() {
    add_.resize(q_ * q_);
    mul_.resize(q_ * q_);
    neg_.resize(q_);
    for (int a = 0; a < q_; ++a) {
      auto da = digits(a);
      std::vector<int> dn(m_);
      for (int i = 0; i < m_; ++i) dn[i] = (p_ - da[i]) % p_;
      neg_[a] = encode(dn);
      for (int b = 0; b < q_; ++b) {
        auto db = digits(b);
        std::vector<int> ds(m_);
        for (int i = 0; i < m_; ++i) ds[i] = (da[i] + db[i]) % p_;
        add_[a * q_ + b] = encode(ds);
        // Polynomial product reduced by the irreducible.
        std::vector<int> prod(2 * m_ - 1, 0);
        for (int i = 0; i < m_; ++i)
          for (int j = 0; j < m_; ++j)
            prod[i + j] = (prod[i + j] + da[i] * db[j]) % p_;
        for (int i = 2 * m_ - 2; i >= m_; --i) {
          int coef = prod[i];
          if (coef == 0) continue;
          prod[i] = 0;
          for (int j = 0; j < m_; ++j)
            prod[i - m_ + j] =
                ((prod[i - m_ + j] - coef * irreducible_[j]) % p_ + p_) % p_;
        }
        prod.resize(m_);
        mul_[a * q_ + b] = encode(prod);
      }
    }
  }

  int q_, p_, m_;
  std::vector<int> irreducible_;  // empty when m == 1
  std::vector<int> add_, mul_, neg_;
};

/// Point-line incidence graph of the projective plane PG(2, q): a bipartite
/// (q+1)-regular graph on 2(q^2+q+1) vertices with girth 6. Points occupy
/// vertex indices [0, N), lines [N, 2N) with N = q^2+q+1.
inline Graph projective_plane_incidence(int q) {
  GaloisField f(q);
  // Normalized homogeneous coordinates: leading nonzero entry is 1.
  std::vector<std::array<int, 3>> points;
  points.push_back({0, 0, 1});
  for (int a = 0; a < q; ++a) points.push_back({0, 1, a});
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) points.push_back({1, a, b});
  int n = static_cast<int>(points.size());
  if (n != q * q + q + 1)
    throw ConstructionError("projective_plane_incidence: bad point count");

  Graph g;
  g.num_vertices = 2 * n;
  for (int pi = 0; pi < n; ++pi)
    for (int li = 0; li < n; ++li) {
      const auto& p = points[pi];
      const auto& l = points[li];
      int dot = 0;
      for (int c = 0; c < 3; ++c) dot = f.add(dot, f.mul(p[c], l[c]));
      if (dot == 0) g.edges.emplace_back(pi, n + li);
    }
  if (g.num_edges() != (q + 1) * n)
    throw ConstructionError("projective_plane_incidence: bad incidence count");
  return g;
}

struct NamedGraph {
  std::string name;
  Graph graph;
};

/// High-girth catalog in increasing edge count, used by the lower-bound
/// experiments.
inline std::vector<NamedGraph> high_girth_catalog() {
  return {
      {"petersen", petersen_graph()},
      {"heawood", heawood_graph()},
      {"mcgee", mcgee_graph()},
      {"pg2-3", projective_plane_incidence(3)},
      {"pg2-4", projective_plane_incidence(4)},
      {"pg2-9", projective_plane_incidence(9)},
  };
}

}  // namespace ocrslab
