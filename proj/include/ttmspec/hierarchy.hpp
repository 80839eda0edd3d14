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

// Exact averaged dynamics for Gaussian classical noise whose correlations are
// sums of (complex) exponentials, via a truncated hierarchy of auxiliary
// operators. Serves as a sampling-free oracle next to the trajectory ensemble.

#pragma once

#include "ttmspec/propagator.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <map>
#include <vector>

namespace ttmspec {

struct HierarchyOptions {
  int depth = 12;  // maximum total excitation of the auxiliary operators
};

namespace detail {

struct Exponent {
  CMatrix op;  // system operator the mode couples through
  cplx c;      // amplitude
  cplx nu;     // rate, Re nu > 0
};

/// C(t) = sum_k c_k e^{-nu_k t} per independent mode. Correlated channels
/// are diagonalized within each connected block of cross_corr.
inline std::vector<Exponent> exponent_decomposition(const SystemSpec& sys, const NoiseSpec& noise) {
  const int n = noise.size();
  const Eigen::MatrixXd cov = noise.equal_time();
  std::vector<int> block(static_cast<std::size_t>(n), -1);
  int blocks = 0;
  for (int a = 0; a < n; ++a) {
    if (block[static_cast<std::size_t>(a)] >= 0) continue;
    std::vector<int> stack{a};
    block[static_cast<std::size_t>(a)] = blocks;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int y = 0; y < n; ++y)
        if (block[static_cast<std::size_t>(y)] < 0 && cov(x, y) != 0.0) {
          block[static_cast<std::size_t>(y)] = blocks;
          stack.push_back(y);
        }
    }
    ++blocks;
  }

  std::vector<Exponent> out;
  for (int b = 0; b < blocks; ++b) {
    std::vector<int> members;
    for (int a = 0; a < n; ++a)
      if (block[static_cast<std::size_t>(a)] == b) members.push_back(a);
    const auto& lead = noise.channels[static_cast<std::size_t>(members.front())];
    if (!lead.tabulated.empty())
      throw ValidationError("propagator", "hierarchy needs exponential correlations");
    Eigen::MatrixXd sub(members.size(), members.size());
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = 0; j < members.size(); ++j) sub(i, j) = cov(members[i], members[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
    for (Eigen::Index m = 0; m < es.eigenvalues().size(); ++m) {
      const double mu = es.eigenvalues()(m);
      if (mu <= 1e-14 * std::max(1.0, sub.cwiseAbs().maxCoeff())) continue;
      CMatrix op = CMatrix::Zero(sys.dim(), sys.dim());
      for (std::size_t i = 0; i < members.size(); ++i)
        op += es.eigenvectors()(static_cast<Eigen::Index>(i), m) *
              sys.coupling(noise.channels[static_cast<std::size_t>(members[i])]);
      if (lead.omega_c == 0.0) {
        out.push_back({op, mu, lead.kappa});
      } else {
        out.push_back({op, 0.5 * mu, cplx(lead.kappa, -lead.omega_c)});
        out.push_back({op, 0.5 * mu, cplx(lead.kappa, lead.omega_c)});
      }
    }
  }
  return out;
}

inline void enumerate_levels(int modes, int depth, std::vector<int>& cur, int pos, int used,
                             std::vector<std::vector<int>>& out) {
  if (pos == modes) {
    out.push_back(cur);
    return;
  }
  for (int k = 0; k + used <= depth; ++k) {
    cur[static_cast<std::size_t>(pos)] = k;
    enumerate_levels(modes, depth, cur, pos + 1, used + k, out);
  }
  cur[static_cast<std::size_t>(pos)] = 0;
}

}  // namespace detail

/// Exact maps E_1..E_K for Gaussian noise with modulated-exponential
/// correlations, converged in `depth`.
inline MapSeries hierarchy_maps(const SystemSpec& sys, const NoiseSpec& noise, double dt,
                                int steps, const HierarchyOptions& opt = {}) {
  sys.validate(noise);
  if (!(dt > 0.0) || steps < 1) throw ValidationError("propagator", "need dt > 0 and K >= 1");
  const auto modes = detail::exponent_decomposition(sys, noise);
  const int d = sys.dim();
  const int d2 = d * d;
  const int m = static_cast<int>(modes.size());

  std::vector<std::vector<int>> levels;
  std::vector<int> cur(static_cast<std::size_t>(m), 0);
  detail::enumerate_levels(m, m == 0 ? 0 : opt.depth, cur, 0, 0, levels);
  std::map<std::vector<int>, int> index;
  for (std::size_t i = 0; i < levels.size(); ++i) index[levels[i]] = static_cast<int>(i);
  const int n_ado = static_cast<int>(levels.size());
  if (static_cast<long long>(n_ado) * d2 > 6000)
    throw ValidationError("propagator", "hierarchy of size " + std::to_string(n_ado * d2) +
                                            " is too large; lower the depth");

  const CMatrix ls = sys.ls().matrix();
  std::vector<CMatrix> comm;
  for (const auto& e : modes) comm.push_back(commutator(e.op).matrix());

  CMatrix gen = CMatrix::Zero(n_ado * d2, n_ado * d2);
  for (int i = 0; i < n_ado; ++i) {
    const auto& lv = levels[static_cast<std::size_t>(i)];
    cplx damp = 0.0;
    for (int k = 0; k < m; ++k) damp += static_cast<double>(lv[static_cast<std::size_t>(k)]) * modes[static_cast<std::size_t>(k)].nu;
    gen.block(i * d2, i * d2, d2, d2) = ls - damp * CMatrix::Identity(d2, d2);
    for (int k = 0; k < m; ++k) {
      const auto& e = modes[static_cast<std::size_t>(k)];
      auto up = lv;
      ++up[static_cast<std::size_t>(k)];
      if (const auto it = index.find(up); it != index.end())
        gen.block(i * d2, it->second * d2, d2, d2) =
            -kI * std::sqrt(static_cast<double>(up[static_cast<std::size_t>(k)]) * e.c) * comm[static_cast<std::size_t>(k)];
      if (lv[static_cast<std::size_t>(k)] > 0) {
        auto down = lv;
        --down[static_cast<std::size_t>(k)];
        gen.block(i * d2, index.at(down) * d2, d2, d2) =
            -kI * std::sqrt(static_cast<double>(lv[static_cast<std::size_t>(k)]) * e.c) * comm[static_cast<std::size_t>(k)];
      }
    }
  }
  const CMatrix step = (gen * dt).exp();

  MapSeries out;
  out.dt = dt;
  CMatrix x = CMatrix::Zero(n_ado * d2, d2);
  x.topRows(d2).setIdentity();
  for (int k = 1; k <= steps; ++k) {
    x = step * x;
    out.maps.emplace_back(d, x.topRows(d2));
  }
  return out;
}

}  // namespace ttmspec
