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

// Transfer tensors: deconvolution of a map series, truncated propagation,
// memory-kernel extraction and norm profiles.

#pragma once

#include "ttmspec/liouville.hpp"
#include "ttmspec/series.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace ttmspec {

struct TransferTensorSeries {
  double dt = 0.0;
  std::vector<Superoperator> tensors;  // T_1..T_K
  std::string source = "simulated";

  int size() const { return static_cast<int>(tensors.size()); }
  int dim() const { return tensors.empty() ? 0 : tensors.front().dim(); }
  const Superoperator& at(int n) const { return tensors.at(static_cast<std::size_t>(n - 1)); }
};

struct KernelSeries {
  double dt = 0.0;
  std::vector<Superoperator> kernels;  // K(t_1)..K(t_K)
  Superoperator ls;

  int size() const { return static_cast<int>(kernels.size()); }
  const Superoperator& at(int n) const { return kernels.at(static_cast<std::size_t>(n - 1)); }
};

/// T_1 = E_1, T_n = E_n - sum_{m=1}^{n-1} T_{n-m} E_m.
inline TransferTensorSeries build_ttms(const MapSeries& maps) {
  if (maps.size() < 1) throw ValidationError("ttm", "map series is empty");
  TransferTensorSeries out;
  out.dt = maps.dt;
  out.tensors.reserve(maps.maps.size());
  for (int n = 1; n <= maps.size(); ++n) {
    CMatrix t = maps.at(n).matrix();
    for (int m = 1; m < n; ++m) t.noalias() -= out.at(n - m).matrix() * maps.at(m).matrix();
    out.tensors.emplace_back(maps.dim(), std::move(t));
  }
  return out;
}

inline void check_truncation(const TransferTensorSeries& ttms, int k_trunc) {
  if (k_trunc < 1 || k_trunc > ttms.size())
    throw ValidationError("ttm", "K_trunc must lie in [1, " + std::to_string(ttms.size()) +
                                     "], got " + std::to_string(k_trunc));
}

/// rho(t_n) = sum_{m=1}^{min(n, K_trunc)} T_m rho(t_{n-m}); element 0 is rho0.
inline std::vector<DensityMatrix> predict_states(const TransferTensorSeries& ttms, int k_trunc,
                                                 const DensityMatrix& rho0, int n_steps) {
  check_truncation(ttms, k_trunc);
  if (rho0.dim() != ttms.dim()) throw DimensionError("ttm", "rho0 does not match tensor dim");
  std::vector<CVector> v{vec(rho0.matrix())};
  for (int n = 1; n <= n_steps; ++n) {
    CVector next = CVector::Zero(v.front().size());
    for (int m = 1; m <= std::min(n, k_trunc); ++m)
      next.noalias() += ttms.at(m).matrix() * v[static_cast<std::size_t>(n - m)];
    v.push_back(std::move(next));
  }
  std::vector<DensityMatrix> out;
  for (const auto& x : v) out.emplace_back(unvec(x, rho0.dim()));
  return out;
}

/// E_n = sum_{m=1}^{min(n, K_trunc)} T_m E_{n-m} with E_0 = identity.
inline MapSeries predict_maps(const TransferTensorSeries& ttms, int k_trunc, int n_total) {
  check_truncation(ttms, k_trunc);
  const int d = ttms.dim();
  std::vector<CMatrix> e{CMatrix::Identity(d * d, d * d)};
  MapSeries out;
  out.dt = ttms.dt;
  for (int n = 1; n <= n_total; ++n) {
    CMatrix next = CMatrix::Zero(d * d, d * d);
    for (int m = 1; m <= std::min(n, k_trunc); ++m)
      next.noalias() += ttms.at(m).matrix() * e[static_cast<std::size_t>(n - m)];
    e.push_back(next);
    out.maps.emplace_back(d, std::move(next));
  }
  return out;
}

/// K(t_n) = (T_n - (1 + L_s dt) delta_{n,1}) / dt^2.
inline KernelSeries extract_kernel(const TransferTensorSeries& ttms, const Superoperator& ls) {
  if (!(ttms.dt > 0.0)) throw ValidationError("ttm", "dt must be positive");
  if (ls.dim() != ttms.dim()) throw DimensionError("ttm", "L_s does not match tensor dim");
  KernelSeries out;
  out.dt = ttms.dt;
  out.ls = ls;
  const double dt2 = ttms.dt * ttms.dt;
  for (int n = 1; n <= ttms.size(); ++n) {
    Superoperator k = ttms.at(n);
    if (n == 1) k -= Superoperator::identity(ls.dim()) + ls * ttms.dt;
    out.kernels.push_back(k * (1.0 / dt2));
  }
  return out;
}

/// Inverse of extract_kernel.
inline TransferTensorSeries tensors_from_kernel(const KernelSeries& ks) {
  TransferTensorSeries out;
  out.dt = ks.dt;
  const double dt2 = ks.dt * ks.dt;
  for (int n = 1; n <= ks.size(); ++n) {
    Superoperator t = ks.at(n) * dt2;
    if (n == 1) t += Superoperator::identity(ks.ls.dim()) + ks.ls * ks.dt;
    out.tensors.push_back(std::move(t));
  }
  return out;
}

/// |T_n| per tensor; with subtract_identity, |T_1 - I| replaces |T_1|.
inline std::vector<double> norm_profile(const TransferTensorSeries& ttms,
                                        bool subtract_identity = false) {
  std::vector<double> out;
  for (int n = 1; n <= ttms.size(); ++n) {
    if (n == 1 && subtract_identity)
      out.push_back(frobenius_norm(ttms.at(1) - Superoperator::identity(ttms.dim())));
    else
      out.push_back(frobenius_norm(ttms.at(n)));
  }
  return out;
}

/// Smallest n with |T_n| / |T_1| < threshold, or K when none qualifies.
inline int default_truncation(const TransferTensorSeries& ttms, double threshold = 1e-3) {
  const auto norms = norm_profile(ttms);
  for (int n = 2; n <= ttms.size(); ++n)
    if (norms[static_cast<std::size_t>(n - 1)] < threshold * norms[0]) return n;
  return ttms.size();
}

/// Mean norm of the last quarter of the profile: the level at which |T_n|
/// stops decaying when the maps carry sampling noise.
inline double norm_floor(const std::vector<double>& profile) {
  if (profile.size() < 4) return 0.0;
  const std::size_t from = profile.size() - profile.size() / 4;
  double s = 0.0;
  for (std::size_t i = from; i < profile.size(); ++i) s += profile[i];
  return s / static_cast<double>(profile.size() - from);
}

/// Generator estimate from maps at dt and 2 dt, eliminating the dt^2 term:
/// L dt = (4 (E(dt) - 1) - (E(2 dt) - 1)) / 2.
inline Superoperator estimate_ls(const Superoperator& e_dt, const Superoperator& e_2dt, double dt) {
  e_dt.check_same(e_2dt);
  const Superoperator id = Superoperator::identity(e_dt.dim());
  return ((e_dt - id) * 4.0 - (e_2dt - id)) * (0.5 / dt);
}

}  // namespace ttmspec
