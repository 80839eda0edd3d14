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

#include "ttmspec/spectroscopy.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace ttmspec {
namespace {

SystemSpec qubit(double bias) {
  SystemSpec s;
  s.bias = {bias};
  return s;
}

CorrelationSeries exponential(char axis, double lambda, double kappa, double dt, int n) {
  CorrelationSeries c;
  c.dt = dt;
  c.active = ChannelMask::diagonal(std::string(1, axis));
  const auto i = static_cast<Eigen::Index>(ChannelMask::axis_index(axis));
  for (int j = 0; j < n; ++j) {
    Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
    m(i, i) = lambda * std::exp(-kappa * j * dt);
    c.values.push_back(m);
  }
  return c;
}

TEST(Spectroscopy, K2DephasingSign) {
  Eigen::Matrix3cd c = Eigen::Matrix3cd::Zero();
  c(2, 2) = 1.0;
  const Superoperator k = k2_model(c, qubit(0.3), 0.0);
  EXPECT_NEAR(std::abs(k(1, 1) - cplx(-4.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(k(2, 2) - cplx(-4.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(k(0, 0)), 0.0, 1e-14);
  // bias rotates the coherence with the lag
  const Superoperator kt = k2_model(c, qubit(0.3), 1.0);
  EXPECT_NEAR(std::abs(kt(1, 1) - cplx(-4.0) * std::exp(cplx(0.0, -0.6))), 0.0, 1e-12);
}

TEST(Spectroscopy, K2EntryHalvesFirstSample) {
  Eigen::Matrix3cd c = Eigen::Matrix3cd::Zero();
  c(0, 0) = 0.5;
  const SystemSpec hs = qubit(0.1);
  EXPECT_TRUE((k2_entry(c, hs, 1, 0.1).matrix() * 2.0).isApprox(k2_model(c, hs, 0.0).matrix()));
  EXPECT_TRUE(k2_entry(c, hs, 3, 0.1).matrix().isApprox(k2_model(c, hs, 0.2).matrix()));
}

TEST(Spectroscopy, FitRecoversSynthesizedCorrelations) {
  const SystemSpec hs = qubit(0.02);
  for (char axis : {'z', 'x'}) {
    const CorrelationSeries truth = exponential(axis, 0.01, 1.0, 0.04, 30);
    const KernelSeries k = synthesize_kernel(truth, hs);
    const CorrelationFit fit =
        fit_correlations(k, hs, truth.active, std::vector<double>(30, 1e-9));
    ASSERT_EQ(fit.corr.size(), 30);
    const auto got = fit.corr.channel(axis, axis);
    const auto want = truth.channel(axis, axis);
    for (std::size_t j = 0; j < got.size(); ++j)
      EXPECT_NEAR(std::abs(got[j] - want[j]), 0.0, 1e-6 * 0.01) << axis << " j=" << j;
  }
}

TEST(Spectroscopy, RegularizationSmoothsNoise) {
  const SystemSpec hs = qubit(0.02);
  const CorrelationSeries truth = exponential('z', 0.01, 1.0, 0.04, 30);
  KernelSeries k = synthesize_kernel(truth, hs);
  std::srand(3);
  for (auto& e : k.kernels) e.matrix() += CMatrix::Random(4, 4) * 2e-4;
  auto roughness = [](const std::vector<cplx>& c) {
    double s = 0.0;
    for (std::size_t j = 1; j < c.size(); ++j) s += std::abs(c[j] - c[j - 1]);
    return s;
  };
  const auto loose = fit_correlations(k, hs, truth.active, std::vector<double>(30, 1e-9));
  const auto smooth = fit_correlations(k, hs, truth.active);
  EXPECT_GT(smooth.default_lambda, 0.0);
  EXPECT_LT(roughness(smooth.corr.channel('z', 'z')), roughness(loose.corr.channel('z', 'z')));
}

TEST(Spectroscopy, LorentzianSpectrum) {
  const double kappa = 1.0, dt = 0.01;
  const CorrelationSeries c = exponential('z', 1.0, kappa, dt, 2000);
  const SpectralDensity s = spectral_density(c, 'z', 'z', SpectrumKind::Classical);
  EXPECT_TRUE(s.decayed);
  // continuum value 2 kappa / (kappa^2 + w^2) up to O(dt^2)
  for (std::size_t i = 0; i < s.omega.size(); ++i) {
    const double w = s.omega[i];
    if (std::abs(w) > 5.0) continue;
    EXPECT_NEAR(s.values[i], 2.0 * kappa / (kappa * kappa + w * w), 1e-3) << "w=" << w;
  }
  EXPECT_NEAR(parseval_sum(s), 1.0, 1e-12);
}

TEST(Spectroscopy, ParsevalHoldsWithModulation) {
  std::vector<cplx> c;
  for (int j = 0; j < 40; ++j) c.push_back(4.0 * std::exp(-0.2 * j) * std::cos(0.9 * j));
  for (int pad : {1, 3})
    EXPECT_NEAR(parseval_sum(spectral_density(c, 0.2, SpectrumKind::Classical, pad)), 4.0, 1e-12);
  const SpectralDensity s = spectral_density(c, 0.2, SpectrumKind::Classical);
  EXPECT_FALSE(spectral_density(std::vector<cplx>(10, 1.0), 0.2, SpectrumKind::Classical).decayed);
  EXPECT_TRUE(s.decayed);
}

TEST(Spectroscopy, QuantumSpectrumOfRealCorrelationVanishes) {
  std::vector<cplx> c;
  for (int j = 0; j < 20; ++j) c.push_back(std::exp(-0.5 * j));
  const SpectralDensity j = spectral_density(c, 0.1, SpectrumKind::Quantum);
  for (double v : j.values) EXPECT_EQ(v, 0.0);
  // an imaginary part gives an odd spectrum
  c[3] += cplx(0.0, 0.1);
  const SpectralDensity odd = spectral_density(c, 0.1, SpectrumKind::Quantum, 1);
  const std::size_t mid = odd.omega.size() / 2;
  EXPECT_EQ(odd.omega[mid], 0.0);
  EXPECT_NEAR(odd.values[mid + 1], -odd.values[mid - 1], 1e-14);
}

TEST(Spectroscopy, ScaledKernelsRecoverLeadingOrder) {
  // K~_i = x1 g_i^2 + x2 g_i^4 with matching dimensionless grids
  const std::vector<double> biases{0.02, 0.1};
  const double dt0 = 0.04, x1 = 3.0, x2 = -5.0;
  const CMatrix shape = CMatrix::Identity(4, 4);
  std::vector<KernelSeries> ks;
  for (double w : biases) {
    KernelSeries k;
    k.dt = dt0 * biases[0] / w;
    k.ls = Superoperator::zero(2);
    const double g = biases[0] / w;
    for (int n = 0; n < 10; ++n)
      k.kernels.emplace_back(2, shape * (w * w * (x1 * g * g + x2 * std::pow(g, 4))));
    ks.push_back(k);
  }
  const ScaledKernel out = combine_scaled_kernels(ks, biases);
  ASSERT_EQ(out.kernel.size(), 10);
  for (const auto& k : out.kernel.kernels)
    EXPECT_LT((k.matrix() - shape * x1 * 0.02 * 0.02).norm(), 1e-12);
  EXPECT_GT(out.condition, 1.0);
  EXPECT_LT(out.interpolation_error, 1e-12);

  // a single series is returned unchanged
  const ScaledKernel one = combine_scaled_kernels({ks[0]}, {0.02});
  EXPECT_LT((one.kernel.at(1).matrix() - ks[0].at(1).matrix()).norm(), 1e-15);
}

TEST(Spectroscopy, Validation) {
  const SystemSpec hs = qubit(0.02);
  const KernelSeries k = synthesize_kernel(exponential('z', 0.01, 1.0, 0.04, 5), hs);
  EXPECT_THROW(fit_correlations(k, hs, ChannelMask{}), ValidationError);
  EXPECT_THROW(fit_correlations(k, hs, ChannelMask::diagonal("z"), {0.1, 0.1}), ValidationError);
  EXPECT_THROW(fit_correlations(KernelSeries{}, hs, ChannelMask::diagonal("z")), ValidationError);
  EXPECT_THROW(ChannelMask::diagonal("w"), ValidationError);
  EXPECT_THROW(combine_scaled_kernels({k, k}, {0.02, 0.02}), ValidationError);
  EXPECT_THROW(combine_scaled_kernels({k}, {0.0}), ValidationError);
  EXPECT_THROW(spectral_density(std::vector<cplx>{1.0}, 0.1, SpectrumKind::Classical), ValidationError);
  SystemSpec two;
  two.n_qubits = 2;
  EXPECT_THROW(k2_model(Eigen::Matrix3cd::Zero(), two, 0.0), DimensionError);
}

}  // namespace
}  // namespace ttmspec
