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

// Stationary real Gaussian noise with prescribed auto- and cross-correlations.
// Paths are drawn exactly by factorizing the joint (channel x time)
// covariance; no autoregressive approximation is involved.

#pragma once

#include "ttmspec/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <vector>

namespace ttmspec {

/// One real noise channel B_a(t) multiplying sigma^axis on `qubit`.
struct NoiseChannel {
  int qubit = 0;
  char axis = 'z';
  double variance = 0.0;  // C_aa(0)
  double kappa = 1.0;
  double omega_c = 0.0;
  // Optional tabulated C_aa(m * tabulated_dt), m = 0, 1, ...; replaces the
  // modulated exponential when non-empty. Zero beyond the table.
  std::vector<double> tabulated;
  double tabulated_dt = 0.0;

  /// Normalized correlation shape, equal to 1 at t = 0.
  double shape(double t) const {
    t = std::abs(t);
    if (tabulated.empty()) return std::exp(-kappa * t) * std::cos(omega_c * t);
    const double x = t / tabulated_dt;
    const auto m = static_cast<std::size_t>(x);
    if (m + 1 >= tabulated.size())
      return m + 1 == tabulated.size() && x == static_cast<double>(m) ? tabulated[m] / tabulated[0] : 0.0;
    const double w = x - static_cast<double>(m);
    return ((1.0 - w) * tabulated[m] + w * tabulated[m + 1]) / tabulated[0];
  }
};

struct NoiseSpec {
  std::vector<NoiseChannel> channels;
  // Equal-time covariances <B_a(0) B_b(0)>. Empty means independent channels
  // with the per-channel variances on the diagonal.
  Eigen::MatrixXd cross_corr;

  int size() const { return static_cast<int>(channels.size()); }

  Eigen::MatrixXd equal_time() const {
    if (cross_corr.size() != 0) return cross_corr;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(size(), size());
    for (int a = 0; a < size(); ++a) s(a, a) = channels[static_cast<std::size_t>(a)].variance;
    return s;
  }

  /// C_ab(t) = <B_a(t) B_b(0)>.
  double correlation(int a, int b, double t) const {
    const double c0 = cross_corr.size() == 0
                          ? (a == b ? channels[static_cast<std::size_t>(a)].variance : 0.0)
                          : cross_corr(a, b);
    if (c0 == 0.0) return 0.0;
    return c0 * channels[static_cast<std::size_t>(a)].shape(t);
  }

  bool is_zero() const { return equal_time().cwiseAbs().maxCoeff() == 0.0; }

  void validate() const {
    const int n = size();
    for (const auto& c : channels) {
      if (c.variance < 0.0) throw ValidationError("noisegen", "negative channel variance");
      if (!(c.kappa >= 0.0) || !std::isfinite(c.omega_c))
        throw ValidationError("noisegen", "decay rate and modulation must be finite, kappa >= 0");
      if (c.axis != 'x' && c.axis != 'y' && c.axis != 'z')
        throw ValidationError("noisegen", std::string("unknown channel axis '") + c.axis + "'");
      if (!c.tabulated.empty() && (c.tabulated_dt <= 0.0 || c.tabulated[0] <= 0.0))
        throw ValidationError("noisegen", "tabulated correlation needs dt > 0 and C(0) > 0");
    }
    if (cross_corr.size() == 0) return;
    if (cross_corr.rows() != n || cross_corr.cols() != n)
      throw DimensionError("noisegen", "cross_corr must be " + std::to_string(n) + "x" +
                                           std::to_string(n));
    if ((cross_corr - cross_corr.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw ValidationError("noisegen", "cross_corr is not symmetric");
    for (int a = 0; a < n; ++a) {
      const auto& ca = channels[static_cast<std::size_t>(a)];
      if (std::abs(cross_corr(a, a) - ca.variance) > 1e-12)
        throw ValidationError("noisegen", "cross_corr diagonal disagrees with channel " +
                                              std::to_string(a) + " variance");
      for (int b = 0; b < n; ++b) {
        if (a == b || cross_corr(a, b) == 0.0) continue;
        const auto& cb = channels[static_cast<std::size_t>(b)];
        if (ca.kappa != cb.kappa || ca.omega_c != cb.omega_c || !ca.tabulated.empty() ||
            !cb.tabulated.empty())
          throw ValidationError("noisegen",
                                "cross-correlated channels must share kappa and omega_c");
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cross_corr, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < -1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff())) {
      std::ostringstream msg;
      msg << "cross_corr is not positive semidefinite (eigenvalue " << lo << ")";
      throw ValidationError("noisegen", msg.str());
    }
  }
};

/// Sampled noise: values(a, m) = B_a(m * dt).
struct NoisePath {
  double dt = 0.0;
  Eigen::MatrixXd values;
  int channels() const { return static_cast<int>(values.rows()); }
  int steps() const { return static_cast<int>(values.cols()); }
};

/// SplitMix64 finalizer; fans a master seed out to per-path streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Exact sampler for a fixed (spec, dt, n_steps). Modulated exponential
/// correlations use a Gauss-Markov recursion; tabulated ones factorize the
/// joint covariance and draw a batch of paths by one matrix product.
class NoiseSampler {
 public:
  static constexpr int kMaxJointSize = 8192;

  NoiseSampler(const NoiseSpec& spec, double dt, int n_steps) : dt_(dt), n_steps_(n_steps) {
    if (!(dt > 0.0)) throw ValidationError("noisegen", "dt must be positive");
    if (n_steps < 1) throw ValidationError("noisegen", "n_steps must be >= 1");
    spec.validate();
    channels_ = spec.size();
    const int n = channels_ * n_steps;
    zero_ = channels_ == 0 || spec.is_zero();
    if (zero_) return;
    markov_ = std::none_of(spec.channels.begin(), spec.channels.end(),
                           [](const NoiseChannel& c) { return !c.tabulated.empty(); });
    if (markov_) {
      setup_markov(spec);
      return;
    }
    if (n > kMaxJointSize)
      throw ValidationError("noisegen", "joint covariance of size " + std::to_string(n) +
                                            " exceeds the exact-sampling limit " +
                                            std::to_string(kMaxJointSize));

    Eigen::MatrixXd cov(n, n);
    for (int a = 0; a < channels_; ++a)
      for (int b = 0; b < channels_; ++b) {
        std::vector<double> lag(static_cast<std::size_t>(n_steps));
        for (int m = 0; m < n_steps; ++m) lag[static_cast<std::size_t>(m)] = spec.correlation(a, b, m * dt);
        for (int i = 0; i < n_steps; ++i)
          for (int j = 0; j < n_steps; ++j)
            cov(a * n_steps + i, b * n_steps + j) = lag[static_cast<std::size_t>(std::abs(i - j))];
      }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) {
      factor_ = llt.matrixL();
      return;
    }
    // Semidefinite (e.g. perfectly correlated channels): symmetric square root.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < -1e-9 * top) {
      std::ostringstream msg;
      msg << "covariance is not positive semidefinite (eigenvalue " << lo << ")";
      throw ValidationError("noisegen", msg.str());
    }
    factor_ = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  int channels() const { return channels_; }
  int steps() const { return n_steps_; }
  double dt() const { return dt_; }

  /// Columns are independent paths, one per seed, stacked as a * n_steps + m.
  Eigen::MatrixXd sample_columns(const std::vector<std::uint64_t>& seeds) const {
    const int n = channels_ * n_steps_;
    const auto cols = static_cast<Eigen::Index>(seeds.size());
    if (zero_) return Eigen::MatrixXd::Zero(n, cols);
    if (markov_) return sample_markov(seeds);
    Eigen::MatrixXd z(factor_.cols(), cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      std::mt19937_64 rng(seeds[static_cast<std::size_t>(c)]);
      std::normal_distribution<double> normal;
      for (Eigen::Index r = 0; r < z.rows(); ++r) z(r, c) = normal(rng);
    }
    return factor_ * z;
  }

  NoisePath sample(std::uint64_t seed) const {
    const Eigen::MatrixXd col = sample_columns({seed});
    NoisePath p;
    p.dt = dt_;
    p.values = Eigen::Map<const Eigen::MatrixXd>(col.data(), n_steps_, channels_).transpose();
    return p;
  }

 private:
  // Modulated exponential correlations are the first component of a damped
  // rotating 2D Gauss-Markov process, so paths follow an exact recursion.
  void setup_markov(const NoiseSpec& spec) {
    const Eigen::MatrixXd sigma = spec.equal_time();
    decay_.resize(channels_);
    cos_.resize(channels_);
    sin_.resize(channels_);
    for (int a = 0; a < channels_; ++a) {
      const auto& c = spec.channels[static_cast<std::size_t>(a)];
      decay_(a) = std::exp(-c.kappa * dt_);
      cos_(a) = std::cos(c.omega_c * dt_);
      sin_(a) = std::sin(c.omega_c * dt_);
    }
    Eigen::MatrixXd q(channels_, channels_);
    for (int a = 0; a < channels_; ++a)
      for (int b = 0; b < channels_; ++b) q(a, b) = sigma(a, b) * (1.0 - decay_(a) * decay_(b));
    init_ = psd_sqrt(sigma);
    innov_ = psd_sqrt(q);
  }

  static Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }

  Eigen::MatrixXd sample_markov(const std::vector<std::uint64_t>& seeds) const {
    const int c = channels_;
    Eigen::MatrixXd out(c * n_steps_, static_cast<Eigen::Index>(seeds.size()));
    std::vector<double> x(static_cast<std::size_t>(2 * c)), z(x.size());
    auto mix = [&](const Eigen::MatrixXd& l, int a, int k) {
      double v = 0.0;
      for (int b = 0; b < c; ++b) v += l(a, b) * z[static_cast<std::size_t>(2 * b + k)];
      return v;
    };
    for (std::size_t col = 0; col < seeds.size(); ++col) {
      std::mt19937_64 rng(seeds[col]);
      std::normal_distribution<double> normal;
      for (auto& v : z) v = normal(rng);
      for (int a = 0; a < c; ++a)
        for (int k = 0; k < 2; ++k) x[static_cast<std::size_t>(2 * a + k)] = mix(init_, a, k);
      const auto cc = static_cast<Eigen::Index>(col);
      for (int m = 0; m < n_steps_; ++m) {
        if (m > 0) {
          for (auto& v : z) v = normal(rng);
          for (int a = 0; a < c; ++a) {
            const auto i = static_cast<std::size_t>(2 * a);
            const double x0 = x[i], x1 = x[i + 1];
            x[i] = decay_(a) * (cos_(a) * x0 - sin_(a) * x1) + mix(innov_, a, 0);
            x[i + 1] = decay_(a) * (sin_(a) * x0 + cos_(a) * x1) + mix(innov_, a, 1);
          }
        }
        for (int a = 0; a < c; ++a) out(a * n_steps_ + m, cc) = x[static_cast<std::size_t>(2 * a)];
      }
    }
    return out;
  }

  double dt_;
  int n_steps_;
  int channels_ = 0;
  bool zero_ = true;
  bool markov_ = false;
  Eigen::MatrixXd factor_;
  Eigen::VectorXd decay_, cos_, sin_;
  Eigen::MatrixXd init_, innov_;
};

inline NoisePath sample_paths(const NoiseSpec& spec, double dt, int n_steps, std::uint64_t seed) {
  return NoiseSampler(spec, dt, n_steps).sample(seed);
}

}  // namespace ttmspec
