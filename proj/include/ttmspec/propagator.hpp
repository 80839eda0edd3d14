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

// Ground-truth dynamics: stochastic-Hamiltonian trajectories averaged into
// dynamical maps, the analytic pure-dephasing series, and XY4-interleaved
// evolution. Every trajectory is propagated with exact exponentials of the
// midpoint-frozen Hamiltonian, so each path stays unitary.

#pragma once

#include "ttmspec/liouville.hpp"
#include "ttmspec/noise.hpp"
#include "ttmspec/qpt.hpp"
#include "ttmspec/series.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace ttmspec {

/// H_s = sum_i bias_i sigma^z_i + zz_coupling sigma^z_1 sigma^z_2.
struct SystemSpec {
  int n_qubits = 1;
  std::vector<double> bias;
  double zz_coupling = 0.0;

  int dim() const { return hilbert_dim(n_qubits); }

  void validate() const {
    if (n_qubits != 1 && n_qubits != 2)
      throw ValidationError("propagator", "n_qubits must be 1 or 2");
    if (static_cast<int>(bias.size()) > n_qubits)
      throw ValidationError("propagator", "more bias terms than qubits");
    for (double b : bias)
      if (!std::isfinite(b)) throw ValidationError("propagator", "bias must be finite");
    if (!std::isfinite(zz_coupling) || (n_qubits == 1 && zz_coupling != 0.0))
      throw ValidationError("propagator", "zz_coupling needs two qubits and a finite value");
  }

  void validate(const NoiseSpec& noise) const {
    validate();
    noise.validate();
    for (const auto& c : noise.channels)
      if (c.qubit < 0 || c.qubit >= n_qubits)
        throw ValidationError("propagator", "noise channel on qubit " + std::to_string(c.qubit) +
                                                " of a " + std::to_string(n_qubits) +
                                                "-qubit system");
  }

  CMatrix hamiltonian() const {
    CMatrix h = CMatrix::Zero(dim(), dim());
    for (std::size_t i = 0; i < bias.size(); ++i)
      h += bias[i] * embed(pauli::Z(), static_cast<int>(i), n_qubits);
    if (n_qubits == 2) h += zz_coupling * kron(pauli::Z(), pauli::Z());
    return h;
  }

  Superoperator ls() const { return liouvillian(hamiltonian()); }

  /// The operator sigma^axis on the channel's qubit.
  CMatrix coupling(const NoiseChannel& c) const {
    return embed(pauli::by_label(static_cast<char>(std::toupper(c.axis))), c.qubit, n_qubits);
  }
};

struct EnsembleOptions {
  int substeps = 8;         // integrator substeps per sampling step
  int batches = 20;         // independent batches for standard errors
  bool antithetic = true;   // pair every path B with -B
  int chunk = 64;           // paths per noise-generation batch
};

/// Mean states of a trajectory ensemble at t_0..t_K with batch means.
struct StateSeries {
  double dt = 0.0;
  std::vector<CMatrix> mean;
  std::vector<std::vector<CMatrix>> batches;
  std::int64_t n_traj = 0;

  /// Standard error of entry (i, j) at step k from the batch spread.
  double std_error(int k, int i, int j) const {
    const auto nb = static_cast<double>(batches.size());
    if (nb < 2) return 0.0;
    cplx m = 0.0;
    for (const auto& b : batches) m += b[static_cast<std::size_t>(k)](i, j);
    m /= nb;
    double v = 0.0;
    for (const auto& b : batches) v += std::norm(b[static_cast<std::size_t>(k)](i, j) - m);
    return std::sqrt(v / (nb - 1.0) / nb);
  }
};

namespace detail {

template <int D>
using Mat = Eigen::Matrix<cplx, D, D>;

/// exp(-i h dt) for Hermitian h.
template <int D>
Mat<D> unitary_step(const Mat<D>& h, double dt) {
  if constexpr (D == 2) {
    const double h0 = 0.5 * (h(0, 0).real() + h(1, 1).real());
    const double hz = 0.5 * (h(0, 0).real() - h(1, 1).real());
    const double hx = h(0, 1).real();
    const double hy = -h(0, 1).imag();
    const double norm = std::sqrt(hx * hx + hy * hy + hz * hz);
    const cplx phase = std::exp(cplx(0.0, -h0 * dt));
    Mat<2> u;
    if (norm == 0.0) {
      u.setIdentity();
      return phase * u;
    }
    const double c = std::cos(norm * dt);
    const double s = std::sin(norm * dt) / norm;
    u(0, 0) = cplx(c, -s * hz);
    u(1, 1) = cplx(c, s * hz);
    u(0, 1) = cplx(-s * hy, -s * hx);
    u(1, 0) = cplx(s * hy, -s * hx);
    return phase * u;
  } else {
    const Mat<D> off = h - Mat<D>(h.diagonal().asDiagonal());
    if (off.cwiseAbs().maxCoeff() == 0.0) {
      Mat<D> u = Mat<D>::Zero();
      for (int i = 0; i < D; ++i) u(i, i) = std::exp(cplx(0.0, -h(i, i).real() * dt));
      return u;
    }
    Eigen::SelfAdjointEigenSolver<Mat<D>> es(h);
    Eigen::Matrix<cplx, D, 1> ph;
    for (int i = 0; i < D; ++i) ph(i) = std::exp(cplx(0.0, -es.eigenvalues()(i) * dt));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  }
}

/// Per-path propagation on the substep grid with optional ideal pulses.
template <int D>
class Propagation {
 public:
  Propagation(const SystemSpec& sys, const NoiseSpec& noise, double h, int per_step)
      : h_(h), per_step_(per_step) {
    hs_ = sys.hamiltonian();
    for (const auto& c : noise.channels) ops_.push_back(sys.coupling(c));
    diagonal_ = is_diagonal(hs_);
    for (const auto& o : ops_) diagonal_ = diagonal_ && is_diagonal(o);
  }

  /// Pulse `op` applied right after local substep `local` of every step.
  void add_pulse(int local, const CMatrix& op) {
    pulses_.push_back({local, Mat<D>(op)});
    diagonal_ = false;
  }

  /// Unitaries at the step boundaries t_1..t_K for one path. `noise` has
  /// layout a * n_sub + m; `sign` flips the path for antithetic pairs.
  void unitaries(const double* noise, int n_sub, double sign, std::vector<Mat<D>>& out) const {
    const int steps = n_sub / per_step_;
    out.resize(static_cast<std::size_t>(steps));
    if (diagonal_) {
      // Commuting diagonal generators: accumulate phases, exponentiate per step.
      Eigen::Matrix<double, D, 1> phase = Eigen::Matrix<double, D, 1>::Zero();
      for (int m = 0; m < n_sub; ++m) {
        phase += h_ * hs_.diagonal().real();
        for (std::size_t a = 0; a < ops_.size(); ++a)
          phase += (h_ * sign * noise[a * static_cast<std::size_t>(n_sub) + static_cast<std::size_t>(m)]) *
                   ops_[a].diagonal().real();
        if (m % per_step_ == per_step_ - 1) {
          Mat<D>& u = out[static_cast<std::size_t>(m / per_step_)];
          u.setZero();
          for (int i = 0; i < D; ++i) u(i, i) = std::polar(1.0, -phase(i));
        }
      }
      return;
    }
    Mat<D> u = Mat<D>::Identity();
    Mat<D> hm;
    for (int m = 0; m < n_sub; ++m) {
      hm = hs_;
      for (std::size_t a = 0; a < ops_.size(); ++a)
        hm += (sign * noise[a * static_cast<std::size_t>(n_sub) + static_cast<std::size_t>(m)]) * ops_[a];
      u = unitary_step<D>(hm, h_) * u;
      const int local = m % per_step_;
      for (const auto& [at, op] : pulses_)
        if (at == local) u = op * u;
      if (local == per_step_ - 1) out[static_cast<std::size_t>(m / per_step_)] = u;
    }
  }

 private:
  double h_;
  int per_step_;
  Mat<D> hs_;
  std::vector<Mat<D>> ops_;
  std::vector<std::pair<int, Mat<D>>> pulses_;
  bool diagonal_ = false;

  static bool is_diagonal(const Mat<D>& m) {
    return (m - Mat<D>(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  }
};

using Slots = std::vector<CMatrix>;

inline void add_into(Slots& a, const Slots& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

/// Fixed-order pairwise reduction of v[lo, hi).
inline Slots pairwise_sum(const std::vector<Slots>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return v[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  Slots a = pairwise_sum(v, lo, mid);
  add_into(a, pairwise_sum(v, mid, hi));
  return a;
}

struct BatchSums {
  std::vector<Slots> sums;              // per batch
  std::vector<std::int64_t> paths;      // per batch
  std::int64_t total_paths = 0;
};

/// Runs n_traj paths through `observe(us, slots)` and returns per-batch sums.
/// Path units (single paths, or antithetic pairs) are split into contiguous
/// batches; each batch reduces its chunk sums pairwise in index order, so the
/// result depends only on (seed, n_traj, options).
template <int D, class Observe>
BatchSums run_ensemble(const Propagation<D>& prop, const NoiseSampler& sampler,
                       std::int64_t n_traj, std::uint64_t seed, const EnsembleOptions& opt,
                       const Slots& zero, Observe observe) {
  if (n_traj < 1) throw ValidationError("propagator", "n_traj must be >= 1");
  const int per_unit = opt.antithetic ? 2 : 1;
  const std::int64_t units = std::max<std::int64_t>(1, (n_traj + per_unit - 1) / per_unit);
  const auto n_batches = static_cast<std::int64_t>(std::clamp<std::int64_t>(opt.batches, 1, units));
  const int n_sub = sampler.steps();
  const int chunk = std::max(1, opt.chunk);

  BatchSums out;
  std::vector<Mat<D>> us;
  for (std::int64_t b = 0; b < n_batches; ++b) {
    const std::int64_t lo = b * units / n_batches;
    const std::int64_t hi = (b + 1) * units / n_batches;
    std::vector<Slots> chunk_sums;
    for (std::int64_t c0 = lo; c0 < hi; c0 += chunk) {
      const std::int64_t c1 = std::min<std::int64_t>(hi, c0 + chunk);
      std::vector<std::uint64_t> seeds;
      for (std::int64_t u = c0; u < c1; ++u) seeds.push_back(stream_seed(seed, static_cast<std::uint64_t>(u)));
      const Eigen::MatrixXd noise = sampler.sample_columns(seeds);
      Slots acc = zero;
      for (Eigen::Index col = 0; col < noise.cols(); ++col) {
        for (int s = 0; s < per_unit; ++s) {
          prop.unitaries(noise.col(col).data(), n_sub, s == 0 ? 1.0 : -1.0, us);
          observe(us, acc);
        }
      }
      chunk_sums.push_back(std::move(acc));
    }
    out.sums.push_back(pairwise_sum(chunk_sums, 0, chunk_sums.size()));
    out.paths.push_back((hi - lo) * per_unit);
    out.total_paths += (hi - lo) * per_unit;
  }
  return out;
}

template <int D>
Mat<D> fixed(const CMatrix& m) {
  return Mat<D>(m);
}

template <int D>
MapSeries maps_from_paths(const SystemSpec& sys, const NoiseSpec& noise, double dt, int steps,
                          std::int64_t n_traj, std::uint64_t seed, const EnsembleOptions& opt,
                          bool xy4) {
  const int per = opt.substeps;
  const NoiseSampler sampler(noise, dt / per, steps * per);
  Propagation<D> prop(sys, noise, dt / per, per);
  if (xy4) {
    if (per % 4 != 0) throw ValidationError("propagator", "XY4 needs substeps divisible by 4");
    const int q = per / 4;
    prop.add_pulse(q - 1, pauli::X());
    prop.add_pulse(2 * q - 1, pauli::Y());
    prop.add_pulse(3 * q - 1, pauli::X());
    prop.add_pulse(4 * q - 1, pauli::Y());
  }
  // vec(U rho U^dag) = (U (x) conj U) vec(rho) in the row-major convention.
  constexpr int L = D * D;
  const Slots zero(static_cast<std::size_t>(steps), CMatrix::Zero(L, L));
  const BatchSums sums = run_ensemble<D>(
      prop, sampler, n_traj, seed, opt, zero, [&](const std::vector<Mat<D>>& us, Slots& acc) {
        Eigen::Matrix<cplx, L, L> k;
        for (std::size_t s = 0; s < us.size(); ++s) {
          const Mat<D>& u = us[s];
          const Mat<D> uc = u.conjugate();
          for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j) k.template block<D, D>(i * D, j * D) = u(i, j) * uc;
          acc[s] += k;
        }
      });

  auto assemble = [&](const Slots& s, double norm) {
    std::vector<Superoperator> maps;
    for (int k = 0; k < steps; ++k) maps.emplace_back(D, s[static_cast<std::size_t>(k)] / norm);
    return maps;
  };

  MapSeries series;
  series.dt = dt;
  series.n_traj = sums.total_paths;
  series.maps = assemble(pairwise_sum(sums.sums, 0, sums.sums.size()),
                         static_cast<double>(sums.total_paths));
  if (sums.sums.size() > 1)
    for (std::size_t b = 0; b < sums.sums.size(); ++b)
      series.batches.push_back(assemble(sums.sums[b], static_cast<double>(sums.paths[b])));
  return series;
}

}  // namespace detail

/// Trajectory-averaged maps E_1..E_K on the grid t_k = k dt.
inline MapSeries ensemble_maps(const SystemSpec& sys, const NoiseSpec& noise, double dt, int steps,
                               std::int64_t n_traj, std::uint64_t seed,
                               const EnsembleOptions& opt = {}) {
  sys.validate(noise);
  if (!(dt > 0.0) || steps < 1) throw ValidationError("propagator", "need dt > 0 and K >= 1");
  if (sys.n_qubits == 1)
    return detail::maps_from_paths<2>(sys, noise, dt, steps, n_traj, seed, opt, false);
  return detail::maps_from_paths<4>(sys, noise, dt, steps, n_traj, seed, opt, false);
}

/// Effective maps at cycle boundaries with ideal pi pulses X, Y, X, Y applied
/// after each quarter of every cycle of length dt_cycle.
inline MapSeries evolve_with_xy4(const SystemSpec& sys, const NoiseSpec& noise, double dt_cycle,
                                 int cycles, std::int64_t n_traj, std::uint64_t seed,
                                 const EnsembleOptions& opt = {}) {
  sys.validate(noise);
  if (sys.n_qubits != 1) throw DimensionError("propagator", "XY4 is implemented for one qubit");
  if (!(dt_cycle > 0.0) || cycles < 1)
    throw ValidationError("propagator", "need dt_cycle > 0 and K >= 1");
  return detail::maps_from_paths<2>(sys, noise, dt_cycle, cycles, n_traj, seed, opt, true);
}

/// Ensemble-averaged states from rho0 at t_0..t_K.
inline StateSeries ensemble_states(const SystemSpec& sys, const NoiseSpec& noise, double dt,
                                   int steps, std::int64_t n_traj, std::uint64_t seed,
                                   const DensityMatrix& rho0, const EnsembleOptions& opt = {}) {
  sys.validate(noise);
  if (rho0.dim() != sys.dim()) throw DimensionError("propagator", "rho0 does not match system");
  auto run = [&]<int D>() {
    const int per = opt.substeps;
    const NoiseSampler sampler(noise, dt / per, steps * per);
    detail::Propagation<D> prop(sys, noise, dt / per, per);
    const detail::Mat<D> r0 = detail::fixed<D>(rho0.matrix());
    const detail::Slots zero(static_cast<std::size_t>(steps), CMatrix::Zero(D, D));
    return detail::run_ensemble<D>(
        prop, sampler, n_traj, seed, opt, zero,
        [&](const std::vector<detail::Mat<D>>& us, detail::Slots& acc) {
          for (std::size_t k = 0; k < us.size(); ++k) {
            const detail::Mat<D> r = us[k] * r0 * us[k].adjoint();
            acc[k] += r;
          }
        });
  };
  const detail::BatchSums sums = sys.n_qubits == 1 ? run.template operator()<2>()
                                                   : run.template operator()<4>();
  auto states = [&](const detail::Slots& s, double norm) {
    std::vector<CMatrix> out{rho0.matrix()};
    for (const auto& m : s) out.push_back(m / norm);
    return out;
  };
  StateSeries out;
  out.dt = dt;
  out.n_traj = sums.total_paths;
  out.mean = states(detail::pairwise_sum(sums.sums, 0, sums.sums.size()),
                    static_cast<double>(sums.total_paths));
  if (sums.sums.size() > 1)
    for (std::size_t b = 0; b < sums.sums.size(); ++b)
      out.batches.push_back(states(sums.sums[b], static_cast<double>(sums.paths[b])));
  return out;
}

/// States along one noise path. Path sample m is the noise on substep m;
/// states are reported every `substeps` path samples, starting with rho0.
inline std::vector<DensityMatrix> evolve_trajectory(const SystemSpec& sys, const NoiseSpec& noise,
                                                    const NoisePath& path,
                                                    const DensityMatrix& rho0, int substeps = 1) {
  sys.validate(noise);
  if (path.channels() != noise.size())
    throw DimensionError("propagator", "path has " + std::to_string(path.channels()) +
                                           " channels, noise spec has " +
                                           std::to_string(noise.size()));
  if (rho0.dim() != sys.dim()) throw DimensionError("propagator", "rho0 does not match system");
  if (!path.values.allFinite()) throw ValidationError("propagator", "non-finite noise values");
  if (substeps < 1 || path.steps() % substeps != 0)
    throw ValidationError("propagator", "path length must be a multiple of substeps");
  const Eigen::MatrixXd flat = path.values.transpose();  // layout a * n_sub + m
  std::vector<DensityMatrix> out{rho0};
  auto run = [&]<int D>() {
    detail::Propagation<D> prop(sys, noise, path.dt, substeps);
    std::vector<detail::Mat<D>> us;
    prop.unitaries(flat.data(), path.steps(), 1.0, us);
    const detail::Mat<D> r0 = detail::fixed<D>(rho0.matrix());
    for (const auto& u : us) out.emplace_back(CMatrix(u * r0 * u.adjoint()));
  };
  if (sys.n_qubits == 1)
    run.template operator()<2>();
  else
    run.template operator()<4>();
  return out;
}

// --- Analytic pure dephasing --------------------------------------------------

/// Gamma(t) = 4 int_0^t (t - s) C(s) ds by adaptive Gauss-Kronrod quadrature.
inline double dephasing_exponent(const std::function<double(double)>& corr, double t) {
  if (t <= 0.0) return 0.0;
  double err = 0.0;
  const double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double s) { return (t - s) * corr(s); }, 0.0, t, 20, 1e-13, &err);
  if (!(err <= 1e-9 * std::max(1.0, std::abs(val))))
    throw ConvergenceError("propagator", "dephasing quadrature did not converge", err);
  return 4.0 * val;
}

/// Closed form of Gamma(t) for C(s) = lambda e^{-kappa s} cos(omega_c s).
inline double lorentzian_dephasing_exponent(double lambda, double kappa, double omega_c, double t) {
  const cplx z(kappa, -omega_c);
  if (std::abs(z) == 0.0) return 2.0 * lambda * t * t;
  return 4.0 * lambda * (t / z - (1.0 - std::exp(-z * t)) / (z * z)).real();
}

/// Exact qubit maps under H_s = omega_s sigma^z with Gaussian sigma^z noise:
/// rho01 -> e^{-Gamma(t) - 2 i omega_s t} rho01.
inline MapSeries analytic_dephasing_series(const std::function<double(double)>& corr,
                                           double omega_s, double dt, int steps) {
  if (!(dt > 0.0) || steps < 1) throw ValidationError("propagator", "need dt > 0 and K >= 1");
  MapSeries s;
  s.dt = dt;
  for (int k = 1; k <= steps; ++k) {
    const double t = k * dt;
    s.maps.push_back(dephasing_map(dephasing_exponent(corr, t), -2.0 * omega_s * t));
  }
  return s;
}

}  // namespace ttmspec
