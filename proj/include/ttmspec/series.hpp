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

#include "ttmspec/core.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace ttmspec {

/// Dynamical maps E_1..E_K sampled at t_k = k * dt.
///
/// Sampled series also carry independent batch means of the same maps so
/// that standard errors of any derived quantity can be formed by batching.
struct MapSeries {
  double dt = 0.0;
  std::vector<Superoperator> maps;
  std::int64_t n_traj = 0;  // 0 for analytic or exact series
  std::vector<std::vector<Superoperator>> batches;

  int dim() const { return maps.empty() ? 0 : maps.front().dim(); }
  int size() const { return static_cast<int>(maps.size()); }
  const Superoperator& at(int k) const { return maps.at(static_cast<std::size_t>(k - 1)); }

  /// Series on the coarser grid factor * dt (E_f, E_2f, ...).
  MapSeries decimate(int factor) const {
    if (factor < 1) throw ValidationError("propagator", "decimation factor must be >= 1");
    MapSeries out;
    out.dt = dt * factor;
    out.n_traj = n_traj;
    for (int k = factor; k <= size(); k += factor) out.maps.push_back(at(k));
    for (const auto& b : batches) {
      std::vector<Superoperator> coarse;
      for (int k = factor; k <= static_cast<int>(b.size()); k += factor)
        coarse.push_back(b[static_cast<std::size_t>(k - 1)]);
      out.batches.push_back(std::move(coarse));
    }
    return out;
  }

  /// The first `k` maps.
  MapSeries truncate(int k) const {
    MapSeries out = *this;
    const auto n = static_cast<std::size_t>(std::min(k, size()));
    out.maps.resize(n);
    for (auto& b : out.batches) b.resize(std::min(n, b.size()));
    return out;
  }

  /// A single batch viewed as its own series.
  MapSeries batch(int b) const {
    MapSeries out;
    out.dt = dt;
    out.maps = batches.at(static_cast<std::size_t>(b));
    out.n_traj = batches.empty() ? 0 : n_traj / static_cast<std::int64_t>(batches.size());
    return out;
  }
};

}  // namespace ttmspec
