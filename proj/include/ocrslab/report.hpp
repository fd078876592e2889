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

#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ocrslab/errors.hpp"

namespace ocrslab {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

/// Locale-free shortest round-trip decimal rendering; the only way doubles
/// enter CSV output.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{})
    throw InvariantError("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

/// Row-oriented CSV builder with deterministic, locale-free formatting.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header)
      : columns_(header.size()) {
    append_row(header);
  }

  void add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
      throw InputError("CsvWriter: row width does not match header");
    append_row(cells);
  }

  const std::string& str() const { return out_; }

 private:
  void append_row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ += ',';
      out_ += escape(cells[i]);
    }
    out_ += '\n';
  }

  static std::string escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string quoted = "\"";
    for (char c : cell) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    quoted += '"';
    return quoted;
  }

  size_t columns_;
  std::string out_;
};

/// FNV-1a 64-bit digest of a byte string, rendered as fixed-width hex.
inline std::string content_digest(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  char buf[17];
  for (int i = 15; i >= 0; --i) {
    buf[i] = "0123456789abcdef"[h & 0xf];
    h >>= 4;
  }
  return std::string(buf, 16);
}

struct OutputRecord {
  std::string file;    // path relative to the output directory
  std::string digest;  // FNV-1a of the bytes written
};

/// Collects experiment artifacts under one directory and emits a manifest.
/// Rerunning with identical config and seed reproduces identical digests;
/// only the manifest's timestamps differ.
class RunArchive {
 public:
  RunArchive(std::filesystem::path out_dir, std::string subcommand,
             uint64_t seed, const nlohmann::json& config)
      : dir_(std::move(out_dir)),
        subcommand_(std::move(subcommand)),
        seed_(seed),
        config_digest_(content_digest(config.dump())),
        started_(now_iso8601()) {
    std::filesystem::create_directories(dir_);
  }

  const std::filesystem::path& dir() const { return dir_; }

  void write_text(const std::string& name, const std::string& bytes) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw InputError("RunArchive: cannot open " + name);
    out << bytes;
    outputs_.push_back({name, content_digest(bytes)});
  }

  void write_json(const std::string& name, nlohmann::json j) {
    j["schema_version"] = kReportSchemaVersion;
    write_text(name, j.dump(2) + "\n");
  }

  void write_csv(const std::string& name, const CsvWriter& csv) {
    write_text(name, csv.str());
  }

  const std::vector<OutputRecord>& outputs() const { return outputs_; }

  /// Writes manifest.json and returns its content. Output digests cover the
  /// artifact bytes; the manifest itself is not self-referential.
  nlohmann::json finalize() {
    nlohmann::json m;
    m["schema_version"] = kReportSchemaVersion;
    m["tool_version"] = kToolVersion;
    m["subcommand"] = subcommand_;
    m["seed"] = seed_;
    m["config_digest"] = config_digest_;
    m["started"] = started_;
    m["finished"] = now_iso8601();
    auto files = nlohmann::json::array();
    for (const auto& rec : outputs_)
      files.push_back({{"file", rec.file}, {"digest", rec.digest}});
    m["outputs"] = std::move(files);
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    if (!out) throw InputError("RunArchive: cannot open manifest.json");
    out << m.dump(2) << "\n";
    return m;
  }

 private:
  static std::string now_iso8601() {
    auto t = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

  std::filesystem::path dir_;
  std::string subcommand_;
  uint64_t seed_;
  std::string config_digest_;
  std::string started_;
  std::vector<OutputRecord> outputs_;
};

}  // namespace ocrslab
