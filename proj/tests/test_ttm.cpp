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

#include "ttmspec/propagator.hpp"
#include "ttmspec/ttm.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ttmspec {
namespace {

MapSeries semigroup(const Superoperator& e, int steps, double dt) {
  MapSeries s;
  s.dt = dt;
  Superoperator acc = Superoperator::identity(e.dim());
  for (int k = 0; k < steps; ++k) {
    acc = compose(e, acc);
    s.maps.push_back(acc);
  }
  return s;
}

MapSeries dephasing_series(int steps) {
  return analytic_dephasing_series(
      [](double t) { return 4.0 * std::exp(-t) * std::cos(4.5 * t); }, 0.1, 0.2, steps);
}

TEST(Ttm, SemigroupHasOnlyFirstTensor) {
  const Superoperator e = dephasing_map(0.1, 0.3);
  const TransferTensorSeries t = build_ttms(semigroup(e, 12, 0.1));
  EXPECT_LT((t.at(1).matrix() - e.matrix()).norm(), 1e-15);
  for (int n = 2; n <= 12; ++n) EXPECT_LT(frobenius_norm(t.at(n)), 1e-13) << n;
  EXPECT_EQ(default_truncation(t), 2);
}

TEST(Ttm, TwoQubitSemigroupNull) {
  CMatrix h = kron(pauli::Z(), pauli::Z()) * 0.3 + kron(pauli::X(), pauli::I()) * 0.2;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const CMatrix u = es.eigenvectors() *
                    (es.eigenvalues().cast<cplx>() * cplx(0.0, -0.1)).array().exp().matrix().asDiagonal() *
                    es.eigenvectors().adjoint();
  const TransferTensorSeries t = build_ttms(semigroup(unitary_map(u), 8, 0.1));
  for (int n = 2; n <= 8; ++n) EXPECT_LT(frobenius_norm(t.at(n)), 1e-12);
}

TEST(Ttm, FullTruncationReproducesMaps) {
  const MapSeries m = dephasing_series(25);
  const TransferTensorSeries t = build_ttms(m);
  const MapSeries back = predict_maps(t, 25, 25);
  for (int k = 1; k <= 25; ++k) EXPECT_LT((back.at(k).matrix() - m.at(k).matrix()).norm(), 1e-10);

  const DensityMatrix rho0 = DensityMatrix::pure(CVector::Ones(2));
  const auto states = predict_states(t, 25, rho0, 25);
  ASSERT_EQ(states.size(), 26u);
  for (int k = 1; k <= 25; ++k)
    EXPECT_LT((states[static_cast<std::size_t>(k)].matrix() - apply(m.at(k), rho0).matrix()).norm(), 1e-10);
}

TEST(Ttm, NonMarkovianDephasingHasMemory) {
  const TransferTensorSeries t = build_ttms(dephasing_series(30));
  const auto prof = norm_profile(t, true);
  EXPECT_GT(prof[1], 1e-2 * prof[0]);
  EXPECT_LT(prof[29], 1e-3 * prof[0]);
  // truncated extrapolation improves with memory length
  const MapSeries exact = dephasing_series(30);
  auto err = [&](int k) {
    const MapSeries p = predict_maps(t, k, 30);
    return std::abs(p.at(30)(1, 1) - exact.at(30)(1, 1));
  };
  EXPECT_GT(err(1), err(5));
  EXPECT_GT(err(5), err(15));
}

TEST(Ttm, KernelRoundTrip) {
  const TransferTensorSeries t = build_ttms(dephasing_series(10));
  const Superoperator ls = liouvillian(pauli::Z() * 0.1);
  const KernelSeries k = extract_kernel(t, ls);
  ASSERT_EQ(k.size(), 10);
  const TransferTensorSeries back = tensors_from_kernel(k);
  for (int n = 1; n <= 10; ++n) EXPECT_LT((back.at(n).matrix() - t.at(n).matrix()).norm(), 1e-12);
  // K(t_n) = T_n / dt^2 beyond the first entry
  EXPECT_LT((k.at(3).matrix() - t.at(3).matrix() / 0.04).norm(), 1e-12);
}

TEST(Ttm, GeneratorEstimate) {
  // e^{L t} for a pure rotation, L = -i[0.5 Z, .]; the error is O(dt^2)
  const Superoperator ls = liouvillian(pauli::Z() * 0.5);
  auto flow = [&](double t) { return dephasing_map(0.0, -1.0 * t); };
  auto err = [&](double dt) {
    return (estimate_ls(flow(dt), flow(2 * dt), dt).matrix() - ls.matrix()).norm();
  };
  EXPECT_LT(err(0.01), 1e-4);
  EXPECT_NEAR(err(0.01) / err(0.005), 4.0, 0.01);
}

TEST(Ttm, NormFloor) {
  EXPECT_EQ(norm_floor({1.0, 0.5}), 0.0);
  EXPECT_DOUBLE_EQ(norm_floor({1.0, 0.5, 0.1, 0.2, 0.3, 0.3, 0.1, 0.1}), 0.1);
}

TEST(Ttm, Validation) {
  const TransferTensorSeries t = build_ttms(dephasing_series(5));
  EXPECT_THROW(check_truncation(t, 0), ValidationError);
  EXPECT_THROW(check_truncation(t, 6), ValidationError);
  EXPECT_THROW(build_ttms(MapSeries{}), ValidationError);
  EXPECT_THROW(predict_states(t, 2, DensityMatrix(CMatrix::Identity(4, 4) / 4.0), 3), DimensionError);
  EXPECT_THROW(extract_kernel(t, Superoperator::zero(4)), DimensionError);
}

}  // namespace
}  // namespace ttmspec
