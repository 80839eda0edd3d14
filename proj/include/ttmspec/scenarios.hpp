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

// Model systems behind the figure presets and the acceptance checks.

#include "ttmspec/hierarchy.hpp"
#include "ttmspec/multiqubit.hpp"
#include "ttmspec/nonmarkov.hpp"
#include "ttmspec/propagator.hpp"
#include "ttmspec/spectroscopy.hpp"
#include "ttmspec/ttm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace ttmspec::scenarios {

inline constexpr std::uint64_t kDefaultSeed = 20261018;

/// Standard error of the mean over batch values.
inline double batch_error(const std::vector<double>& v) {
  const auto n = static_cast<double>(v.size());
  if (v.size() < 2) return 0.0;
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (n - 1.0) / n);
}

inline double batch_error(const std::vector<cplx>& v) {
  const auto n = static_cast<double>(v.size());
  if (v.size() < 2) return 0.0;
  cplx m = 0.0;
  for (cplx x : v) m += x;
  m /= n;
  double s = 0.0;
  for (cplx x : v) s += std::norm(x - m);
  return std::sqrt(s / (n - 1.0) / n);
}

inline DensityMatrix plus_state() {
  CVector psi(2);
  psi << 1.0, 1.0;
  return DensityMatrix::pure(psi);
}

// --- Single-qubit Lorentzian dephasing -----------------------------------------

struct DephasingModel {
  double omega_s = 0.1;
  double lambda = 4.0;
  double kappa = 1.0;
  double omega_c = 4.5;
  double dt = 0.2;
  int steps = 40;

  SystemSpec system() const {
    SystemSpec s;
    s.bias = {omega_s};
    return s;
  }
  NoiseSpec noise() const {
    NoiseSpec n;
    NoiseChannel c;
    c.variance = lambda;
    c.kappa = kappa;
    c.omega_c = omega_c;
    n.channels = {c};
    return n;
  }
  double gamma(double t) const { return lorentzian_dephasing_exponent(lambda, kappa, omega_c, t); }
  MapSeries simulate(std::int64_t n_traj, std::uint64_t seed) const {
    return ensemble_maps(system(), noise(), dt, steps, n_traj, seed);
  }
};

struct Fig1Result {
  std::vector<double> profile;  // |T_1 - I|, |T_2|, ...
  int above_threshold = 0;      // entries above 1% of |T_1 - I|
  std::vector<double> oracle;   // e^{-Gamma(t_n)}, n = 0..steps
  std::vector<int> k_truncs;
  std::vector<std::vector<double>> predicted;  // 2 |rho01| per K_trunc
  std::vector<double> max_error;
};

inline Fig1Result fig1(const DephasingModel& model, const MapSeries& maps,
                       const std::vector<int>& k_truncs = {1, 3, 5}) {
  Fig1Result r;
  const TransferTensorSeries ttms = build_ttms(maps);
  r.profile = norm_profile(ttms, true);
  for (double v : r.profile) r.above_threshold += v > 0.01 * r.profile.front();
  for (int n = 0; n <= model.steps; ++n) r.oracle.push_back(std::exp(-model.gamma(n * model.dt)));
  r.k_truncs = k_truncs;
  for (int k : k_truncs) {
    const auto states = predict_states(ttms, k, plus_state(), model.steps);
    std::vector<double> coh;
    double worst = 0.0;
    for (int n = 0; n <= model.steps; ++n) {
      coh.push_back(2.0 * std::abs(states[static_cast<std::size_t>(n)](0, 1)));
      worst = std::max(worst, std::abs(coh.back() - r.oracle[static_cast<std::size_t>(n)]));
    }
    r.predicted.push_back(std::move(coh));
    r.max_error.push_back(worst);
  }
  return r;
}

struct Fig2Result {
  int k_trunc = 0;
  std::vector<double> exact;     // e^{-2 Gamma}
  std::vector<double> direct;    // volume of the sampled maps
  std::vector<double> extended;  // volume of TTM-extended maps
  std::vector<double> std_error; // batch error of `extended`
  double nv_extended = 0.0;
  double nv_exact = 0.0;
};

inline Fig2Result fig2(const DephasingModel& model, const MapSeries& maps, int k_trunc = 15) {
  Fig2Result r;
  r.k_trunc = k_trunc;
  VolumeSeries exact;
  exact.dt = model.dt;
  for (int n = 0; n <= model.steps; ++n) exact.values.push_back(std::exp(-2.0 * model.gamma(n * model.dt)));
  r.exact = exact.values;
  r.nv_exact = volume_measure(exact);
  r.direct = volume_series(maps).values;
  auto [vs, nv] = extended_volume_measure(build_ttms(maps.truncate(k_trunc)), k_trunc, model.steps);
  r.extended = vs.values;
  r.nv_extended = nv;
  std::vector<std::vector<double>> per_batch;
  for (int b = 0; b < static_cast<int>(maps.batches.size()); ++b)
    per_batch.push_back(
        extended_volume_measure(build_ttms(maps.batch(b).truncate(k_trunc)), k_trunc, model.steps)
            .first.values);
  for (int n = 0; n <= model.steps; ++n) {
    std::vector<double> col;
    for (const auto& v : per_batch) col.push_back(v[static_cast<std::size_t>(n)]);
    r.std_error.push_back(batch_error(col));
  }
  return r;
}

// --- Correlation-function spectroscopy -----------------------------------------

struct SpectroscopyModel {
  double omega_s = 0.02;
  double lambda = 0.01;
  double kappa = 1.0;
  double omega_c = 0.0;
  double dt = 0.04;
  int steps = 30;
  char axis = 'z';

  SystemSpec system() const {
    SystemSpec s;
    s.bias = {omega_s};
    return s;
  }
  NoiseSpec noise() const {
    NoiseSpec n;
    NoiseChannel c;
    c.axis = axis;
    c.variance = lambda;
    c.kappa = kappa;
    c.omega_c = omega_c;
    n.channels = {c};
    return n;
  }
  double correlation(double t) const { return lambda * std::exp(-kappa * t) * std::cos(omega_c * t); }
  /// Exact maps: closed form for sigma^z coupling, hierarchy otherwise.
  MapSeries exact_maps(const HierarchyOptions& opt = {}) const {
    if (axis == 'z')
      return analytic_dephasing_series([this](double t) { return correlation(t); }, omega_s, dt, steps);
    return hierarchy_maps(system(), noise(), dt, steps, opt);
  }
};

struct FitComparison {
  CorrelationFit fit;
  std::vector<double> times;
  std::vector<double> fitted;
  std::vector<double> exact;

  double max_relative_error(int points) const {
    double w = 0.0;
    for (int j = 0; j < std::min(points, static_cast<int>(fitted.size())); ++j)
      w = std::max(w, std::abs(fitted[static_cast<std::size_t>(j)] - exact[static_cast<std::size_t>(j)]) /
                          std::abs(exact[static_cast<std::size_t>(j)]));
    return w;
  }
};

inline FitComparison fit_model(const SpectroscopyModel& model, const MapSeries& maps) {
  const SystemSpec sys = model.system();
  const KernelSeries k = extract_kernel(build_ttms(maps), sys.ls());
  FitComparison r;
  r.fit = fit_correlations(k, sys, ChannelMask::diagonal(std::string(1, model.axis)));
  const auto a = static_cast<Eigen::Index>(ChannelMask::axis_index(model.axis));
  for (int j = 0; j < r.fit.corr.size(); ++j) {
    r.times.push_back(j * model.dt);
    r.fitted.push_back(r.fit.corr.values[static_cast<std::size_t>(j)](a, a).real());
    r.exact.push_back(model.correlation(j * model.dt));
  }
  return r;
}

/// Sigma^z coupling, weak noise.
inline FitComparison fig3top(const SpectroscopyModel& model = {}) {
  return fit_model(model, model.exact_maps());
}

/// Sigma^x coupling: relaxation plus dephasing, exact maps from the hierarchy.
inline FitComparison fig4(SpectroscopyModel model = {}, const HierarchyOptions& opt = {}) {
  model.axis = 'x';
  return fit_model(model, model.exact_maps(opt));
}

struct ScalingRow {
  double lambda = 0.0;
  double exact = 0.0;
  double naive = 0.0;   // K ~ K_2 fit at the target bias
  double scaled = 0.0;  // fit of the multi-bias second-order kernel
  double condition = 0.0;
  double interpolation_error = 0.0;
};

/// Biases beyond the first are simulated with the noise rate scaled by
/// w_i / w_0 and sampled at dt w_0 / w_i, so all kernels share one
/// dimensionless grid while the coupling strength stays fixed.
inline std::vector<ScalingRow> fig3bottom(const SpectroscopyModel& base,
                                          const std::vector<double>& lambdas,
                                          const std::vector<double>& biases = {0.02, 0.10},
                                          int lag = 15) {
  if (biases.empty() || biases.front() != base.omega_s)
    throw ValidationError("spectroscopy", "first bias must be the target bias");
  std::vector<ScalingRow> rows;
  for (double lam : lambdas) {
    ScalingRow row;
    row.lambda = lam;
    std::vector<KernelSeries> kernels;
    for (double w : biases) {
      SpectroscopyModel m = base;
      const double ratio = w / base.omega_s;
      m.lambda = lam;
      m.omega_s = w;
      m.kappa = base.kappa * ratio;
      m.omega_c = base.omega_c * ratio;
      m.dt = base.dt / ratio;
      kernels.push_back(extract_kernel(build_ttms(m.exact_maps()), m.system().ls()));
    }
    SpectroscopyModel target = base;
    target.lambda = lam;
    const SystemSpec sys = target.system();
    const auto mask = ChannelMask::diagonal(std::string(1, base.axis));
    const auto a = static_cast<Eigen::Index>(ChannelMask::axis_index(base.axis));
    row.exact = target.correlation(lag * base.dt);
    const CorrelationFit naive = fit_correlations(kernels.front(), sys, mask);
    row.naive = naive.corr.values.at(static_cast<std::size_t>(lag))(a, a).real();
    const ScaledKernel sk = combine_scaled_kernels(kernels, biases);
    row.condition = sk.condition;
    row.interpolation_error = sk.interpolation_error;
    const CorrelationFit scaled = fit_correlations(sk.kernel, sys, mask);
    row.scaled = scaled.corr.values.at(static_cast<std::size_t>(lag))(a, a).real();
    rows.push_back(row);
  }
  return rows;
}

/// lambda_k = (k * 1.6 / 6)^2, k = 1..6.
inline std::vector<double> fig3bottom_lambdas() {
  std::vector<double> out;
  for (int k = 1; k <= 6; ++k) out.push_back(std::pow(k * 1.6 / 6.0, 2));
  return out;
}

// --- Two-qubit pure dephasing ----------------------------------------------------

struct TwoQubitModel {
  int which = 1;  // 1: zz coupling, independent noise; 2: no coupling, correlated noise
  double dt = 0.2;
  double kappa = 1.0;
  double omega_c = 0.0;

  SystemSpec system() const {
    SystemSpec s;
    s.n_qubits = 2;
    s.bias = {0.1, 0.1};
    s.zz_coupling = which == 1 ? 0.05 : 0.0;
    return s;
  }
  NoiseSpec noise() const {
    NoiseSpec n;
    NoiseChannel c;
    c.variance = 1.0;
    c.kappa = kappa;
    c.omega_c = omega_c;
    NoiseChannel c2 = c;
    c2.qubit = 1;
    n.channels = {c, c2};
    if (which == 2) n.cross_corr = Eigen::MatrixXd::Ones(2, 2);
    return n;
  }
  /// (|00> + |10>)/sqrt2 for model 1, (|01> + |10>)/sqrt2 for model 2.
  DensityMatrix rho0() const {
    CVector psi = CVector::Zero(4);
    psi(which == 1 ? 0 : 1) = 1.0;
    psi(2) = 1.0;
    return DensityMatrix::pure(psi);
  }
  /// The coherence that carries the initial superposition.
  std::pair<int, int> element() const { return {which == 1 ? 0 : 1, 2}; }
};

struct Fig5Result {
  std::vector<double> full, separable, correlated;  // norm profiles
  Isolation isolation;                              // from exact maps
  CMatrix dk_reindexed;                             // dK dt^2 in the re-indexed basis
  CollectiveReport report;
};

inline Fig5Result fig5(const TwoQubitModel& model, int steps, std::int64_t n_traj,
                       std::uint64_t seed, const HierarchyOptions& opt = {}) {
  const SystemSpec sys = model.system();
  const NoiseSpec noise = model.noise();
  Fig5Result r;
  const UnraveledSeries u = unravel(ensemble_maps(sys, noise, model.dt, steps, n_traj, seed));
  r.full = norm_profile(u.full, true);
  r.separable = norm_profile(u.separable, true);
  r.correlated = norm_profile(u.correlated);
  r.isolation = isolate_from_series(hierarchy_maps(sys, noise, model.dt, 2, opt), &noise);
  r.dk_reindexed = reindex_bipartite(r.isolation.dk_dt2.matrix());
  r.report = collective_report(u, r.isolation);
  return r;
}

struct Fig6Result {
  std::vector<int> map_counts;
  std::vector<cplx> oracle;
  std::vector<double> oracle_error;
  std::vector<std::vector<cplx>> full;       // per map count
  std::vector<std::vector<cplx>> separable;  // per map count
  std::vector<double> full_error;            // batch error, largest map count

  /// Largest |full - oracle| in units of the combined standard error.
  double worst_z(double floor = 1e-10) const {
    double w = 0.0;
    for (std::size_t n = 0; n < oracle.size(); ++n)
      w = std::max(w, std::abs(full.back()[n] - oracle[n]) / combined_error(n, floor));
    return w;
  }
  /// Largest separable deviation and 3 standard errors at that time.
  std::pair<double, double> separable_gap(double floor = 1e-10) const {
    double dev = 0.0, band = 0.0;
    for (std::size_t n = 0; n < oracle.size(); ++n) {
      const double d = std::abs(separable.back()[n] - oracle[n]);
      if (d > dev) {
        dev = d;
        band = 3.0 * combined_error(n, floor);
      }
    }
    return {dev, band};
  }
  double combined_error(std::size_t n, double floor) const {
    return std::max(floor, std::hypot(full_error[n], oracle_error[n]));
  }
};

/// Predictions from the first n maps (n in map_counts) against a trajectory
/// oracle drawn with an independent seed.
inline Fig6Result fig6(const TwoQubitModel& model, int steps, std::vector<int> map_counts,
                       std::int64_t n_traj, std::uint64_t seed) {
  if (map_counts.empty()) throw ValidationError("multiqubit", "need at least one map count");
  std::sort(map_counts.begin(), map_counts.end());
  const SystemSpec sys = model.system();
  const NoiseSpec noise = model.noise();
  const int k_max = map_counts.back();
  const MapSeries maps = ensemble_maps(sys, noise, model.dt, k_max, n_traj, seed);
  const StateSeries oracle =
      ensemble_states(sys, noise, model.dt, steps, n_traj, stream_seed(seed, 0x6f7261636c65ULL), model.rho0());
  const auto [i, j] = model.element();
  Fig6Result r;
  r.map_counts = map_counts;
  for (int n = 0; n <= steps; ++n) {
    r.oracle.push_back(oracle.mean[static_cast<std::size_t>(n)](i, j));
    r.oracle_error.push_back(oracle.std_error(n, i, j));
  }
  const UnraveledSeries u = unravel(maps);
  auto element = [&](const std::vector<DensityMatrix>& states) {
    std::vector<cplx> out;
    for (const auto& s : states) out.push_back(s(i, j));
    return out;
  };
  for (int k : map_counts) {
    r.full.push_back(element(predict_states(u.full, k, model.rho0(), steps)));
    r.separable.push_back(element(predict_states(u.separable, k, model.rho0(), steps)));
  }
  std::vector<std::vector<cplx>> per_batch;
  for (int b = 0; b < static_cast<int>(maps.batches.size()); ++b)
    per_batch.push_back(
        element(predict_states(build_ttms(maps.batch(b)), k_max, model.rho0(), steps)));
  for (int n = 0; n <= steps; ++n) {
    std::vector<cplx> col;
    for (const auto& v : per_batch) col.push_back(v[static_cast<std::size_t>(n)]);
    r.full_error.push_back(batch_error(col));
  }
  return r;
}

// --- Dynamical decoupling ----------------------------------------------------------

struct Xy4Model {
  double omega_s = 0.1;
  double lambda = 0.25;
  double kappa = 0.05;
  double omega_c = 0.0;
  double dt_cycle = 0.4;
  int cycles = 30;

  SystemSpec system() const {
    SystemSpec s;
    s.bias = {omega_s};
    return s;
  }
  NoiseSpec noise() const {
    NoiseSpec n;
    NoiseChannel c;
    c.variance = lambda;
    c.kappa = kappa;
    c.omega_c = omega_c;
    n.channels = {c};
    return n;
  }
};

struct Xy4Result {
  std::vector<double> free_profile;
  std::vector<double> xy4_profile;
  double threshold = 0.0;  // 1% of the free-evolution |T_1 - I|
  int free_count = 0;
  int xy4_count = 0;
};

inline Xy4Result xy4(const Xy4Model& model, std::int64_t n_traj, std::uint64_t seed) {
  Xy4Result r;
  const SystemSpec sys = model.system();
  const NoiseSpec noise = model.noise();
  r.free_profile = norm_profile(build_ttms(ensemble_maps(sys, noise, model.dt_cycle, model.cycles, n_traj, seed)), true);
  r.xy4_profile = norm_profile(
      build_ttms(evolve_with_xy4(sys, noise, model.dt_cycle, model.cycles, n_traj, seed)), true);
  r.threshold = 0.01 * r.free_profile.front();
  for (double v : r.free_profile) r.free_count += v > r.threshold;
  for (double v : r.xy4_profile) r.xy4_count += v > r.threshold;
  return r;
}

}  // namespace ttmspec::scenarios
