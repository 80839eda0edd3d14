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

// Noise spectroscopy from memory kernels: the second-order kernel model,
// sequential regularized correlation fits, spectral densities, and the
// multi-bias scaling protocol that removes higher-order kernel terms.

#pragma once

#include "ttmspec/liouville.hpp"
#include "ttmspec/propagator.hpp"
#include "ttmspec/ttm.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace ttmspec {

/// Which correlation channels C_{aa'} (a, a' in x, y, z) take part in a fit.
struct ChannelMask {
  std::array<std::array<bool, 3>, 3> on{};

  static ChannelMask diagonal(const std::string& axes) {
    ChannelMask m;
    for (char c : axes) m.on[axis_index(c)][axis_index(c)] = true;
    return m;
  }
  static ChannelMask all() {
    ChannelMask m;
    for (auto& row : m.on) row.fill(true);
    return m;
  }
  static std::size_t axis_index(char c) {
    switch (c) {
      case 'x': case 'X': return 0;
      case 'y': case 'Y': return 1;
      case 'z': case 'Z': return 2;
      default: throw ValidationError("spectroscopy", std::string("unknown axis '") + c + "'");
    }
  }
  int count() const {
    int n = 0;
    for (const auto& row : on)
      for (bool b : row) n += b;
    return n;
  }
};

/// C_{aa'}(j dt) for j = 0, 1, ...
struct CorrelationSeries {
  double dt = 0.0;
  std::vector<Eigen::Matrix3cd> values;
  ChannelMask active;

  int size() const { return static_cast<int>(values.size()); }
  std::vector<cplx> channel(char a, char b) const {
    std::vector<cplx> out;
    for (const auto& v : values)
      out.push_back(v(static_cast<Eigen::Index>(ChannelMask::axis_index(a)),
                      static_cast<Eigen::Index>(ChannelMask::axis_index(b))));
    return out;
  }
};

enum class SpectrumKind { Classical, Quantum };

struct SpectralDensity {
  std::vector<double> omega;
  std::vector<double> values;
  SpectrumKind kind = SpectrumKind::Classical;
  bool decayed = true;  // false when |C(t_end)| >= 1% of |C(0)|
};

/// K_2(t)(.) = -sum_{aa'} [s^a, U_t (C_{aa'} s^{a'} (.) - C*_{aa'} (.) s^{a'}) U_t^dag]
/// with U_t = exp(-i H_s t). The overall sign makes sigma^z dephasing decay:
/// the rho01 entry of K_2(0) is -4 C_zz(0).
inline Superoperator k2_model(const Eigen::Matrix3cd& corr, const SystemSpec& hs, double t) {
  if (hs.n_qubits != 1) throw DimensionError("spectroscopy", "K2 model is single-qubit");
  const CMatrix u = detail::unitary_step<2>(detail::Mat<2>(hs.hamiltonian()), t);
  const CMatrix prop = unitary_map(u).matrix();
  CMatrix out = CMatrix::Zero(4, 4);
  for (int a = 0; a < 3; ++a) {
    const CMatrix outer = commutator(pauli::by_index(a + 1)).matrix();
    CMatrix inner = CMatrix::Zero(4, 4);
    for (int b = 0; b < 3; ++b) {
      const cplx c = corr(a, b);
      if (c == cplx(0.0)) continue;
      const CMatrix s = pauli::by_index(b + 1);
      inner += c * left_mul(s).matrix() - std::conj(c) * right_mul(s).matrix();
    }
    out -= outer * prop * inner;
  }
  return {2, std::move(out)};
}

/// Model value of kernel entry n (1-based) of an extracted series: entry n
/// samples the kernel at lag (n - 1) dt, and T_1 carries half of K(0).
inline Superoperator k2_entry(const Eigen::Matrix3cd& corr, const SystemSpec& hs, int n, double dt) {
  Superoperator k = k2_model(corr, hs, (n - 1) * dt);
  return n == 1 ? k * 0.5 : k;
}

/// Kernel series whose entries follow k2_entry exactly.
inline KernelSeries synthesize_kernel(const CorrelationSeries& corr, const SystemSpec& hs) {
  KernelSeries ks;
  ks.dt = corr.dt;
  ks.ls = hs.ls();
  for (int n = 1; n <= corr.size(); ++n)
    ks.kernels.push_back(k2_entry(corr.values[static_cast<std::size_t>(n - 1)], hs, n, corr.dt));
  return ks;
}

struct FitOptions {
  bool classical = true;      // real correlations only
  double huber_knee = 1e-6;
  int max_iter = 200;
  double tol = 1e-13;
};

struct CorrelationFit {
  CorrelationSeries corr;
  std::vector<double> residual;  // |K2 - K_exp|_F per entry
  std::vector<int> iterations;
  double default_lambda = 0.0;
};

/// Sequential fit of C(t_j) to kernel entries, minimizing
/// |K2(C) - K_exp|_F + lambda_n sum |C(t_j) - C(t_{j-1})| with a Huber-smoothed
/// absolute value. Empty `lambdas` selects 0.1 |K_exp(t_1)|_F everywhere.
inline CorrelationFit fit_correlations(const KernelSeries& kexp, const SystemSpec& hs,
                                       const ChannelMask& active,
                                       std::vector<double> lambdas = {},
                                       const FitOptions& opt = {}) {
  if (kexp.size() < 1) throw ValidationError("spectroscopy", "kernel series is empty");
  if (active.count() == 0) throw ValidationError("spectroscopy", "no active channels");
  const int n_k = kexp.size();
  CorrelationFit fit;
  fit.default_lambda = 0.1 * frobenius_norm(kexp.at(1));
  if (lambdas.empty()) lambdas.assign(static_cast<std::size_t>(n_k), fit.default_lambda);
  if (static_cast<int>(lambdas.size()) != n_k)
    throw ValidationError("spectroscopy", "need one lambda per kernel entry (" +
                                              std::to_string(n_k) + ")");

  struct Param {
    int a, b;
    cplx unit;
  };
  std::vector<Param> params;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (active.on[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) {
        params.push_back({a, b, 1.0});
        if (!opt.classical) params.push_back({a, b, kI});
      }
  const int np = static_cast<int>(params.size());
  const char* axes = "xyz";

  auto design = [&](int n) {
    Eigen::MatrixXd a(32, np);
    for (int p = 0; p < np; ++p) {
      Eigen::Matrix3cd c = Eigen::Matrix3cd::Zero();
      c(params[static_cast<std::size_t>(p)].a, params[static_cast<std::size_t>(p)].b) = params[static_cast<std::size_t>(p)].unit;
      const CMatrix m = k2_entry(c, hs, n, kexp.dt).matrix();
      for (int i = 0; i < 16; ++i) {
        a(i, p) = m(i / 4, i % 4).real();
        a(16 + i, p) = m(i / 4, i % 4).imag();
      }
    }
    return a;
  };
  auto target = [&](int n) {
    Eigen::VectorXd b(32);
    const CMatrix& m = kexp.at(n).matrix();
    for (int i = 0; i < 16; ++i) {
      b(i) = m(i / 4, i % 4).real();
      b(16 + i) = m(i / 4, i % 4).imag();
    }
    return b;
  };

  {
    const Eigen::MatrixXd a = design(std::min(2, n_k));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-10 * sv(0)) {
      std::string names;
      for (const auto& p : params)
        names += std::string(" C") + axes[p.a] + axes[p.b] + (p.unit == kI ? "(im)" : "");
      throw ValidationError("spectroscopy",
                            "degenerate fit: active channels{" + names +
                                " } produce linearly dependent kernel signatures");
    }
  }

  const double knee = opt.huber_knee;
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(np);
  fit.corr.dt = kexp.dt;
  fit.corr.active = active;
  for (int n = 1; n <= n_k; ++n) {
    const Eigen::MatrixXd a = design(n);
    const Eigen::VectorXd b = target(n);
    const double lam = n > 1 ? lambdas[static_cast<std::size_t>(n - 1)] : 0.0;

    Eigen::VectorXd x = prev;
    if (n == 1) {
      // rho01 decay of pure sigma^z dephasing fixes C_zz(0) in closed form.
      for (int p = 0; p < np; ++p)
        if (params[static_cast<std::size_t>(p)].a == 2 && params[static_cast<std::size_t>(p)].b == 2 &&
            params[static_cast<std::size_t>(p)].unit == cplx(1.0))
          x(p) = -kexp.at(1)(1, 1).real() / 2.0;
    }
    auto objective = [&](const Eigen::VectorXd& v) {
      double f = (a * v - b).norm();
      for (int p = 0; p < np; ++p) {
        const double u = std::abs(v(p) - prev(p));
        f += lam * (u <= knee ? 0.5 * u * u / knee : u - 0.5 * knee);
      }
      return f;
    };

    double f = objective(x);
    int it = 0;
    bool done = false;
    for (; it < opt.max_iter && !done; ++it) {
      const Eigen::VectorXd r = a * x - b;
      const double rn = std::max(r.norm(), 1e-300);
      Eigen::VectorXd g = a.transpose() * r / rn;
      Eigen::MatrixXd h = a.transpose() * a / rn;
      for (int p = 0; p < np; ++p) {
        const double u = x(p) - prev(p);
        g(p) += lam * (std::abs(u) <= knee ? u / knee : (u > 0 ? 1.0 : -1.0));
        h(p, p) += lam / std::max(std::abs(u), knee);
      }
      // Damped Gauss-Newton step with backtracking.
      double mu = 0.0;
      bool accepted = false;
      for (int tries = 0; tries < 60 && !accepted; ++tries) {
        Eigen::MatrixXd hd = h;
        hd.diagonal().array() += mu;
        const Eigen::VectorXd step = hd.ldlt().solve(-g);
        const Eigen::VectorXd trial = x + step;
        const double ft = objective(trial);
        if (ft <= f) {
          const double change = step.norm();
          accepted = true;
          done = change <= opt.tol * (1.0 + x.norm()) || f - ft <= 1e-16 * f;
          x = trial;
          f = ft;
        } else {
          mu = mu == 0.0 ? 1e-12 * std::max(1.0, h.diagonal().maxCoeff()) : mu * 10.0;
        }
      }
      if (!accepted) done = true;  // no descent direction left: stationary
    }
    if (!done)
      throw ConvergenceError("spectroscopy",
                             "correlation fit did not converge at entry " + std::to_string(n),
                             (a * x - b).norm());
    Eigen::Matrix3cd c = Eigen::Matrix3cd::Zero();
    for (int p = 0; p < np; ++p) c(params[static_cast<std::size_t>(p)].a, params[static_cast<std::size_t>(p)].b) += x(p) * params[static_cast<std::size_t>(p)].unit;
    fit.corr.values.push_back(c);
    fit.residual.push_back((a * x - b).norm());
    fit.iterations.push_back(it);
    prev = x;
  }
  return fit;
}

/// Discrete Fourier transform S(w_k) = sum_n C(t_n) e^{i w_k t_n} dt over the
/// series extended to negative times, zero-padded by `padding`, on the grid
/// w_k = 2 pi k / (K' dt), k = -K'/2 .. K'/2 - 1. Classical: C(-t) = C_{a'a}(t)
/// (an even real series for auto-correlations). Quantum: C(-t) = C*(t) and
/// J = (1/2) FT[C - C*].
inline SpectralDensity spectral_density(const std::vector<cplx>& c, double dt, SpectrumKind kind,
                                        int padding = 4,
                                        const std::vector<cplx>& transposed = {}) {
  if (c.size() < 2) throw ValidationError("spectroscopy", "correlation series too short");
  if (!(dt > 0.0) || padding < 1) throw ValidationError("spectroscopy", "need dt > 0, padding >= 1");
  const int k = static_cast<int>(c.size());
  const std::vector<cplx>& neg = transposed.empty() ? c : transposed;
  if (static_cast<int>(neg.size()) != k)
    throw DimensionError("spectroscopy", "transposed channel has a different length");

  SpectralDensity out;
  out.kind = kind;
  out.decayed = std::abs(c.back()) < 0.01 * std::abs(c.front());
  const int kp = padding * (2 * k - 1);
  const double dw = 2.0 * std::numbers::pi / (kp * dt);
  for (int j = -kp / 2; j < kp - kp / 2; ++j) {
    const double w = j * dw;
    double s = 0.0;
    if (kind == SpectrumKind::Classical) {
      s = c[0].real();
      for (int n = 1; n < k; ++n) {
        const double ph = w * n * dt;
        // C(t) e^{iwt} + C(-t) e^{-iwt}; the imaginary parts cancel for a
        // real process.
        s += (c[static_cast<std::size_t>(n)] * std::exp(cplx(0.0, ph)) +
              neg[static_cast<std::size_t>(n)] * std::exp(cplx(0.0, -ph)))
                 .real();
      }
    } else {
      // C - C* = 2i Im C is odd in t under C(-t) = C*(t), so only the sine
      // transform of Im C survives.
      for (int n = 1; n < k; ++n) s -= 2.0 * c[static_cast<std::size_t>(n)].imag() * std::sin(w * n * dt);
    }
    out.omega.push_back(w);
    out.values.push_back(s * dt);
  }
  return out;
}

inline SpectralDensity spectral_density(const CorrelationSeries& corr, char a, char b,
                                        SpectrumKind kind, int padding = 4) {
  return spectral_density(corr.channel(a, b), corr.dt, kind, padding,
                          a == b ? std::vector<cplx>{} : corr.channel(b, a));
}

/// sum_k S(w_k) dw / (2 pi); equals C(0) on the full grid.
inline double parseval_sum(const SpectralDensity& s) {
  if (s.omega.size() < 2) return 0.0;
  const double dw = s.omega[1] - s.omega[0];
  double acc = 0.0;
  for (double v : s.values) acc += v;
  return acc * dw / (2.0 * std::numbers::pi);
}

// --- Multi-bias scaling protocol ---------------------------------------------

struct ScaledKernel {
  KernelSeries kernel;        // second-order estimate at bias 0, original units
  double condition = 0.0;     // of the gamma matrix A
  double interpolation_error = 0.0;  // relative, largest over inputs
};

/// Given kernels measured at biases w_i (the first is the target), forms the
/// dimensionless kernels K~_i(tau) = K_i / w_i^2 on tau = t w_i, interpolates
/// them linearly onto the target grid and solves A x = K~ entrywise with
/// A_{in} = gamma_i^{2n}, gamma_i = w_0 / w_i. Returns x_1 w_0^2.
inline ScaledKernel combine_scaled_kernels(const std::vector<KernelSeries>& kernels,
                                           const std::vector<double>& biases) {
  const int n = static_cast<int>(kernels.size());
  if (n < 1 || static_cast<int>(biases.size()) != n)
    throw ValidationError("spectroscopy", "need one bias per kernel series");
  for (double w : biases)
    if (!(w != 0.0) || !std::isfinite(w)) throw ValidationError("spectroscopy", "biases must be nonzero");
  std::vector<double> gamma;
  for (double w : biases) gamma.push_back(biases[0] / w);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(gamma[static_cast<std::size_t>(i)] * gamma[static_cast<std::size_t>(i)] -
                   gamma[static_cast<std::size_t>(j)] * gamma[static_cast<std::size_t>(j)]) < 1e-12)
        throw ValidationError("spectroscopy", "duplicate scaling factors make A singular");

  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) a(i, k) = std::pow(gamma[static_cast<std::size_t>(i)], 2 * (k + 1));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  ScaledKernel out;
  out.condition = svd.singularValues()(0) / svd.singularValues()(n - 1);
  const Eigen::MatrixXd a_inv = a.inverse();

  const KernelSeries& ref = kernels[0];
  const double tau0 = ref.dt * std::abs(biases[0]);
  // Dimensionless kernel i at target grid point tau = m * tau0 (entry m).
  auto sample = [&](int i, int m, bool quadratic) -> std::optional<CMatrix> {
    const KernelSeries& k = kernels[static_cast<std::size_t>(i)];
    const double w = biases[static_cast<std::size_t>(i)];
    const double step = k.dt * std::abs(w);
    const double x = m * tau0 / step;  // fractional entry index
    const int lo = static_cast<int>(std::floor(x + 1e-9));
    const double frac = std::max(0.0, x - lo);
    if (lo < 1 || lo > k.size() || (frac > 1e-9 && lo + 1 > k.size())) return std::nullopt;
    auto at = [&](int e) { return CMatrix(k.at(e).matrix() / (w * w)); };
    if (frac <= 1e-9) return at(lo);
    if (!quadratic || lo + 2 > k.size()) return CMatrix((1.0 - frac) * at(lo) + frac * at(lo + 1));
    const double f = frac;
    return CMatrix(0.5 * (f - 1) * (f - 2) * at(lo) - f * (f - 2) * at(lo + 1) +
                   0.5 * f * (f - 1) * at(lo + 2));
  };

  out.kernel.dt = ref.dt;
  out.kernel.ls = ref.ls;
  const double w0sq = biases[0] * biases[0];
  for (int m = 1; m <= ref.size(); ++m) {
    std::vector<CMatrix> rhs;
    for (int i = 0; i < n; ++i) {
      const auto v = sample(i, m, false);
      if (!v) break;
      if (const auto q = sample(i, m, true); q && v->norm() > 0.0)
        out.interpolation_error = std::max(out.interpolation_error, (*q - *v).norm() / v->norm());
      rhs.push_back(*v);
    }
    if (static_cast<int>(rhs.size()) < n) break;
    CMatrix x1 = CMatrix::Zero(ref.kernels[0].matrix().rows(), ref.kernels[0].matrix().cols());
    for (int i = 0; i < n; ++i) x1 += a_inv(0, i) * rhs[static_cast<std::size_t>(i)];
    out.kernel.kernels.emplace_back(ref.ls.dim(), x1 * w0sq);
  }
  return out;
}

}  // namespace ttmspec
