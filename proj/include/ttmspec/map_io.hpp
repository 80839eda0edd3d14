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

// JSON export of superoperators and map series. Entries are written
// row-major as [re, im] pairs; doubles use shortest round-trip formatting so
// reading back is bit-exact.

#pragma once

#include "ttmspec/series.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace ttmspec {

inline constexpr const char* kVecConvention = "row-major-vec";

inline nlohmann::json map_to_json(const Superoperator& s, double dt, int time_index) {
  nlohmann::json entries = nlohmann::json::array();
  const auto n = s.matrix().rows();
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      entries.push_back({s.matrix()(r, c).real(), s.matrix()(r, c).imag()});
  return {{"dim", s.dim()},
          {"dt", dt},
          {"time_index", time_index},
          {"convention", kVecConvention},
          {"entries", std::move(entries)}};
}

inline Superoperator map_from_json(const nlohmann::json& j) {
  if (!j.contains("dim") || !j.contains("entries"))
    throw ValidationError("liouville", "map document needs 'dim' and 'entries'");
  if (j.value("convention", std::string(kVecConvention)) != kVecConvention)
    throw ValidationError("liouville", "unsupported vectorization convention '" +
                                           j["convention"].get<std::string>() + "'");
  const int d = j["dim"].get<int>();
  const auto& e = j["entries"];
  const int n = d * d;
  if (!e.is_array() || static_cast<int>(e.size()) != n * n)
    throw DimensionError("liouville", "map of dim " + std::to_string(d) + " needs " +
                                          std::to_string(n * n) + " entries");
  CMatrix m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const auto& z = e[static_cast<std::size_t>(r * n + c)];
      m(r, c) = cplx(z.at(0).get<double>(), z.at(1).get<double>());
    }
  return {d, std::move(m)};
}

inline nlohmann::json series_to_json(const MapSeries& s) {
  nlohmann::json maps = nlohmann::json::array();
  for (int k = 1; k <= s.size(); ++k) maps.push_back(map_to_json(s.at(k), s.dt, k));
  return {{"dt", s.dt}, {"n_traj", s.n_traj}, {"maps", std::move(maps)}};
}

inline MapSeries series_from_json(const nlohmann::json& j) {
  MapSeries s;
  s.dt = j.at("dt").get<double>();
  s.n_traj = j.value("n_traj", std::int64_t{0});
  int expect = 1;
  for (const auto& m : j.at("maps")) {
    if (m.value("time_index", expect) != expect)
      throw ValidationError("liouville", "map series out of order at time_index " +
                                             std::to_string(m.value("time_index", -1)));
    s.maps.push_back(map_from_json(m));
    ++expect;
  }
  if (s.maps.empty()) throw ValidationError("liouville", "map series is empty");
  return s;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot open '" + path + "' for writing");
  out << j.dump(1) << '\n';
}

inline nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("io", path + ": " + e.what());
  }
}

}  // namespace ttmspec
