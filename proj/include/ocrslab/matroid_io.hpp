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

#include <fstream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ocrslab/errors.hpp"
#include "ocrslab/matroid.hpp"
#include "ocrslab/matroid_union.hpp"

namespace ocrslab {

inline constexpr int kMatroidSchemaVersion = 1;

// JSON descriptions of matroids. Every description object carries a "kind"
// and kind-specific fields; the top-level file wrapper adds a
// "schema_version". Round-trips are lossless for all supported kinds.

inline nlohmann::json matroid_to_json(const Matroid& m);

namespace detail {

inline nlohmann::json subset_to_json(const ElementSubset& s) {
  nlohmann::json arr = nlohmann::json::array();
  s.for_each([&](int e) { arr.push_back(e); });
  return arr;
}

inline ElementSubset subset_from_json(const nlohmann::json& arr, int n) {
  ElementSubset s(n);
  for (const auto& v : arr) {
    int e = v.get<int>();
    if (e < 0 || e >= n)
      throw InputError("matroid description: element index out of range");
    s.insert(e);
  }
  return s;
}

}  // namespace detail

inline MatroidPtr matroid_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw InputError("matroid description: missing kind");
  std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "uniform") {
      return std::make_shared<UniformMatroid>(j.at("size").get<int>(),
                                              j.at("cap").get<int>());
    }
    if (kind == "graphic") {
      std::vector<std::pair<int, int>> edges;
      for (const auto& e : j.at("edges"))
        edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
      return std::make_shared<GraphicMatroid>(j.at("num_vertices").get<int>(),
                                              std::move(edges));
    }
    if (kind == "partition") {
      return std::make_shared<PartitionMatroid>(
          j.at("size").get<int>(),
          j.at("blocks").get<std::vector<std::vector<int>>>(),
          j.at("capacities").get<std::vector<int>>());
    }
    if (kind == "explicit") {
      int n = j.at("size").get<int>();
      std::vector<ElementSubset> sets;
      for (const auto& s : j.at("independent_sets"))
        sets.push_back(detail::subset_from_json(s, n));
      return std::make_shared<ExplicitMatroid>(n, sets);
    }
    if (kind == "union") {
      std::vector<MatroidPtr> bases;
      for (const auto& b : j.at("bases"))
        bases.push_back(matroid_from_json(b));
      return std::make_shared<UnionMatroid>(std::move(bases));
    }
    if (kind == "extended_kfold") {
      return std::make_shared<ExtendedKFoldUnion>(
          matroid_from_json(j.at("base")), j.at("k").get<int>());
    }
    if (kind == "restriction") {
      MatroidPtr parent = matroid_from_json(j.at("parent"));
      ElementSubset domain =
          detail::subset_from_json(j.at("domain"), parent->size());
      return std::make_shared<RestrictionMatroid>(std::move(parent),
                                                  std::move(domain));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("matroid description: ") + e.what());
  }
  throw InputError("matroid description: unknown kind '" + kind + "'");
}

inline nlohmann::json matroid_to_json(const Matroid& m) {
  nlohmann::json j;
  if (const auto* u = dynamic_cast<const UniformMatroid*>(&m)) {
    j["kind"] = "uniform";
    j["size"] = u->size();
    j["cap"] = u->cap();
  } else if (const auto* g = dynamic_cast<const GraphicMatroid*>(&m)) {
    j["kind"] = "graphic";
    j["num_vertices"] = g->num_vertices();
    auto edges = nlohmann::json::array();
    for (auto [a, b] : g->edges()) edges.push_back({a, b});
    j["edges"] = std::move(edges);
  } else if (const auto* p = dynamic_cast<const PartitionMatroid*>(&m)) {
    j["kind"] = "partition";
    j["size"] = p->size();
    j["blocks"] = p->blocks();
    j["capacities"] = p->capacities();
  } else if (const auto* x = dynamic_cast<const ExplicitMatroid*>(&m)) {
    j["kind"] = "explicit";
    j["size"] = x->size();
    auto sets = nlohmann::json::array();
    for (const auto& s : x->independent_sets())
      sets.push_back(detail::subset_to_json(s));
    j["independent_sets"] = std::move(sets);
  } else if (const auto* un = dynamic_cast<const UnionMatroid*>(&m)) {
    j["kind"] = "union";
    auto bases = nlohmann::json::array();
    for (const auto& b : un->bases()) bases.push_back(matroid_to_json(*b));
    j["bases"] = std::move(bases);
  } else if (const auto* ek = dynamic_cast<const ExtendedKFoldUnion*>(&m)) {
    j["kind"] = "extended_kfold";
    j["base"] = matroid_to_json(*ek->base());
    j["k"] = ek->fold();
  } else if (const auto* r = dynamic_cast<const RestrictionMatroid*>(&m)) {
    j["kind"] = "restriction";
    j["parent"] = matroid_to_json(*r->parent());
    j["domain"] = detail::subset_to_json(r->domain());
  } else {
    throw CapabilityError("matroid_to_json: unsupported matroid type");
  }
  return j;
}

/// File wrapper: {"schema_version": 1, "matroid": {...}}.
inline nlohmann::json matroid_file_json(const Matroid& m) {
  nlohmann::json j;
  j["schema_version"] = kMatroidSchemaVersion;
  j["matroid"] = matroid_to_json(m);
  return j;
}

inline MatroidPtr matroid_from_file_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("schema_version"))
    throw InputError("matroid file: missing schema_version");
  int v = j.at("schema_version").get<int>();
  if (v != kMatroidSchemaVersion)
    throw InputError("matroid file: unsupported schema_version " +
                     std::to_string(v));
  if (!j.contains("matroid"))
    throw InputError("matroid file: missing matroid object");
  return matroid_from_json(j.at("matroid"));
}

inline MatroidPtr load_matroid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("load_matroid: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("load_matroid: parse error: ") + e.what());
  }
  return matroid_from_file_json(j);
}

inline void save_matroid(const Matroid& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("save_matroid: cannot open " + path);
  out << matroid_file_json(m).dump(2) << "\n";
}

}  // namespace ocrslab
