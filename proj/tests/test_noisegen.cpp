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

#include "ttmspec/noise.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

namespace ttmspec {
namespace {

NoiseSpec lorentzian(double lambda, double kappa, double omega_c) {
  NoiseSpec s;
  s.channels.push_back({0, 'z', lambda, kappa, omega_c, {}, 0.0});
  return s;
}

std::vector<std::uint64_t> seeds(int n, std::uint64_t master) {
  std::vector<std::uint64_t> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = stream_seed(master, static_cast<std::uint64_t>(i));
  return out;
}

// Empirical <B(m dt) B(0)> averaged over start times, with a 5 sigma band.
void expect_covariance(const NoiseSpec& spec, double dt, int steps, int n_paths) {
  const NoiseSampler sampler(spec, dt, steps);
  const Eigen::MatrixXd p = sampler.sample_columns(seeds(n_paths, 99));
  const double c0 = spec.correlation(0, 0, 0.0);
  for (int lag : {0, 1, 2, 5, 10}) {
    double acc = 0.0;
    for (int c = 0; c < n_paths; ++c) acc += p(lag, c) * p(0, c);
    const double est = acc / n_paths;
    const double want = spec.correlation(0, 0, lag * dt);
    const double se = std::sqrt((c0 * c0 + want * want) / n_paths);
    EXPECT_NEAR(est, want, 5.0 * se) << "lag " << lag;
  }
}

TEST(NoiseGen, ShapeAndCorrelation) {
  const NoiseSpec s = lorentzian(4.0, 1.0, 4.5);
  EXPECT_DOUBLE_EQ(s.correlation(0, 0, 0.0), 4.0);
  EXPECT_NEAR(s.correlation(0, 0, 0.3), 4.0 * std::exp(-0.3) * std::cos(1.35), 1e-15);
  EXPECT_DOUBLE_EQ(s.correlation(0, 0, -0.3), s.correlation(0, 0, 0.3));
}

TEST(NoiseGen, MarkovSamplerCovariance) {
  expect_covariance(lorentzian(4.0, 1.0, 4.5), 0.05, 20, 100000);
  expect_covariance(lorentzian(1.0, 0.3, 0.0), 0.2, 20, 100000);
}

TEST(NoiseGen, TabulatedSamplerCovariance) {
  NoiseSpec s;
  NoiseChannel c;
  c.variance = 2.0;
  c.tabulated = {2.0, 1.5, 0.8, 0.3, 0.0};
  c.tabulated_dt = 0.1;
  s.channels.push_back(c);
  EXPECT_NEAR(s.correlation(0, 0, 0.15), 2.0 * 0.5 * (1.5 + 0.8) / 2.0, 1e-12);
  EXPECT_EQ(s.correlation(0, 0, 0.5), 0.0);
  expect_covariance(s, 0.1, 12, 100000);
}

TEST(NoiseGen, StationaryAlongPath) {
  const NoiseSpec s = lorentzian(1.0, 1.0, 0.0);
  const NoiseSampler sampler(s, 0.1, 40);
  const Eigen::MatrixXd p = sampler.sample_columns(seeds(50000, 5));
  for (int m : {0, 20, 39}) {
    const double var = p.row(m).squaredNorm() / p.cols();
    EXPECT_NEAR(var, 1.0, 5.0 * std::sqrt(2.0 / p.cols()));
  }
}

TEST(NoiseGen, PerfectlyCorrelatedChannelsAreEqual) {
  NoiseSpec s;
  s.channels.push_back({0, 'z', 1.0, 1.0, 0.0, {}, 0.0});
  s.channels.push_back({1, 'z', 1.0, 1.0, 0.0, {}, 0.0});
  s.cross_corr = Eigen::MatrixXd::Ones(2, 2);
  const NoisePath p = sample_paths(s, 0.2, 16, 7);
  EXPECT_LT((p.values.row(0) - p.values.row(1)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GT(p.values.row(0).norm(), 0.0);
}

TEST(NoiseGen, IndependentChannelsUncorrelated) {
  NoiseSpec s;
  s.channels.push_back({0, 'z', 1.0, 1.0, 0.0, {}, 0.0});
  s.channels.push_back({1, 'z', 1.0, 1.0, 0.0, {}, 0.0});
  const NoiseSampler sampler(s, 0.2, 4);
  const Eigen::MatrixXd p = sampler.sample_columns(seeds(50000, 3));
  const double cross = p.row(0).dot(p.row(4)) / p.cols();
  EXPECT_NEAR(cross, 0.0, 5.0 / std::sqrt(50000.0));
}

TEST(NoiseGen, DeterministicPerSeed) {
  const NoiseSpec s = lorentzian(4.0, 1.0, 4.5);
  const NoisePath a = sample_paths(s, 0.2, 40, 123);
  const NoisePath b = sample_paths(s, 0.2, 40, 123);
  const NoisePath c = sample_paths(s, 0.2, 40, 124);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
  EXPECT_EQ(a.channels(), 1);
  EXPECT_EQ(a.steps(), 40);
}

TEST(NoiseGen, ZeroNoiseGivesZeroPaths) {
  const NoisePath p = sample_paths(lorentzian(0.0, 1.0, 0.0), 0.2, 10, 1);
  EXPECT_EQ(p.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(NoiseGen, StreamSeedsDiffer) {
  EXPECT_NE(stream_seed(1, 0), stream_seed(1, 1));
  EXPECT_NE(stream_seed(1, 0), stream_seed(2, 0));
  EXPECT_EQ(stream_seed(7, 3), stream_seed(7, 3));
}

TEST(NoiseGen, Validation) {
  EXPECT_THROW(lorentzian(-1.0, 1.0, 0.0).validate(), ValidationError);
  EXPECT_THROW(lorentzian(1.0, -1.0, 0.0).validate(), ValidationError);
  NoiseSpec bad_axis = lorentzian(1.0, 1.0, 0.0);
  bad_axis.channels[0].axis = 'q';
  EXPECT_THROW(bad_axis.validate(), ValidationError);

  NoiseSpec two;
  two.channels.push_back({0, 'z', 1.0, 1.0, 0.0, {}, 0.0});
  two.channels.push_back({1, 'z', 1.0, 1.0, 0.0, {}, 0.0});
  two.cross_corr = Eigen::MatrixXd::Ones(3, 3);
  EXPECT_THROW(two.validate(), DimensionError);
  two.cross_corr = Eigen::MatrixXd::Ones(2, 2) * 2.0;
  two.cross_corr(0, 0) = two.cross_corr(1, 1) = 1.0;
  EXPECT_THROW(two.validate(), ValidationError);  // not PSD
  two.cross_corr = Eigen::MatrixXd::Ones(2, 2);
  two.channels[1].kappa = 2.0;
  EXPECT_THROW(two.validate(), ValidationError);  // shared decay required

  EXPECT_THROW(NoiseSampler(lorentzian(1.0, 1.0, 0.0), 0.0, 10), ValidationError);
  EXPECT_THROW(NoiseSampler(lorentzian(1.0, 1.0, 0.0), 0.1, 0), ValidationError);
}

}  // namespace
}  // namespace ttmspec
