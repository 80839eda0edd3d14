// Copyright 2026 The ttmspec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// CSV series and key=value reports with a reproducibility header.

#include "ttmspec/core.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ttmspec {

inline constexpr const char* kToolVersion = "0.1.0";

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Shortest round-trip text for a double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Header carried by every output file. No timestamp, so identical runs give
/// identical bytes.
struct Metadata {
  std::string config_hash;
  std::string seed = "none";
  std::string origin;  // mode or preset name

  std::string line() const {
    return "# ttmspec " + std::string(kToolVersion) + " origin=" + origin +
           " config_hash=" + config_hash + " seed=" + seed;
  }
};

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add(const std::vector<double>& row) {
    if (row.size() != columns_.size())
      throw DimensionError("cli", "row has " + std::to_string(row.size()) + " values for " +
                                      std::to_string(columns_.size()) + " columns");
    rows_.push_back(row);
  }

  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<double>& row(std::size_t i) const { return rows_.at(i); }

  std::string to_csv(const Metadata& meta) const {
    std::string out = meta.line() + '\n';
    for (std::size_t c = 0; c < columns_.size(); ++c) out += (c ? "," : "") + columns_[c];
    out += '\n';
    for (const auto& r : rows_) {
      for (std::size_t c = 0; c < r.size(); ++c) out += (c ? "," : "") + format_double(r[c]);
      out += '\n';
    }
    return out;
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

/// Ordered key=value diagnostics.
class Report {
 public:
  void set(const std::string& key, const std::string& value) { items_.emplace_back(key, value); }
  void set(const std::string& key, double value) { set(key, format_double(value)); }
  void set(const std::string& key, int value) { set(key, std::to_string(value)); }
  void set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }

  std::string to_text(const Metadata& meta) const {
    std::string out = meta.line() + '\n';
    for (const auto& [k, v] : items_) out += k + "=" + v + '\n';
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cli", "cannot write " + path.string());
  f << text;
}

}  // namespace ttmspec
