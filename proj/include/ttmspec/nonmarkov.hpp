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

// Bloch-volume non-Markovianity: V(t_n) = det M_n and the accumulated growth
// N_V. N_V = 0 does not certify Markovian dynamics, since the measure is
// blind to memory carried only by the affine offset c_n.

#pragma once

#include "ttmspec/liouville.hpp"
#include "ttmspec/series.hpp"
#include "ttmspec/ttm.hpp"

#include <utility>
#include <vector>

namespace ttmspec {

struct VolumeSeries {
  double dt = 0.0;
  std::vector<double> values;  // V(t_0) = 1, V(t_1), ...

  /// Indices with |V| > 1 + tol, which no physical qubit map produces.
  std::vector<int> violations(double tol = 1e-10) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (std::abs(values[i]) > 1.0 + tol) out.push_back(static_cast<int>(i));
    return out;
  }
};

inline VolumeSeries volume_series(const MapSeries& maps) {
  if (maps.dim() != 2) throw DimensionError("nonmarkov", "Bloch volume needs qubit maps");
  VolumeSeries vs;
  vs.dt = maps.dt;
  vs.values.push_back(1.0);
  for (const auto& m : maps.maps) vs.values.push_back(bloch_affine(m).M.determinant());
  return vs;
}

/// Sum of positive forward differences divided by V(t_0).
inline double volume_measure(const VolumeSeries& vs) {
  if (vs.values.size() < 2) throw ValidationError("nonmarkov", "need at least two volumes");
  if (vs.values.front() == 0.0) throw ValidationError("nonmarkov", "V(t_0) is zero");
  double acc = 0.0;
  for (std::size_t i = 1; i < vs.values.size(); ++i)
    acc += std::max(0.0, vs.values[i] - vs.values[i - 1]);
  return acc / vs.values.front();
}

/// Running value of the measure after each sample.
inline std::vector<double> cumulative_measure(const VolumeSeries& vs) {
  std::vector<double> out{0.0};
  for (std::size_t i = 1; i < vs.values.size(); ++i)
    out.push_back(out.back() + std::max(0.0, vs.values[i] - vs.values[i - 1]) / vs.values.front());
  return out;
}

/// Volume series of TTM-propagated maps out to n_total steps and its measure.
inline std::pair<VolumeSeries, double> extended_volume_measure(const TransferTensorSeries& ttms,
                                                               int k_trunc, int n_total) {
  if (ttms.dim() != 2) throw DimensionError("nonmarkov", "Bloch volume needs qubit maps");
  VolumeSeries vs = volume_series(predict_maps(ttms, k_trunc, n_total));
  const double nv = volume_measure(vs);
  return {std::move(vs), nv};
}

}  // namespace ttmspec
