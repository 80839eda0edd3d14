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

#include "ttmspec/hierarchy.hpp"
#include "ttmspec/multiqubit.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ttmspec {
namespace {

SystemSpec pair(double zz) {
  SystemSpec s;
  s.n_qubits = 2;
  s.bias = {0.1, 0.1};
  s.zz_coupling = zz;
  return s;
}

NoiseSpec collective(double kappa) {
  NoiseSpec n;
  n.channels.push_back({0, 'z', 1.0, kappa, 0.0, {}, 0.0});
  n.channels.push_back({1, 'z', 1.0, kappa, 0.0, {}, 0.0});
  n.cross_corr = Eigen::MatrixXd::Ones(2, 2);
  return n;
}

MapSeries product_series(int steps, double dt) {
  MapSeries s;
  s.dt = dt;
  for (int k = 1; k <= steps; ++k) {
    const double t = k * dt;
    s.maps.push_back(tensor(dephasing_map(0.3 * t * t, -0.2 * t), dephasing_map(0.1 * t, 0.5 * t)));
  }
  return s;
}

MapSeries unitary_series(const CMatrix& h, int steps, double dt) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  MapSeries s;
  s.dt = dt;
  for (int k = 1; k <= steps; ++k) {
    const CVector ph = (es.eigenvalues().cast<cplx>() * cplx(0.0, -k * dt)).array().exp();
    s.maps.push_back(unitary_map(es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint()));
  }
  return s;
}

TEST(MultiQubit, ProductMapsAreSeparable) {
  const MapSeries m = product_series(6, 0.2);
  for (const auto& e : m.maps) EXPECT_LT((separable_part(e).matrix() - e.matrix()).norm(), 1e-12);
  const UnraveledSeries u = unravel(m);
  for (const auto& t : u.correlated.tensors) EXPECT_LT(frobenius_norm(t), 1e-12);
  const Isolation iso = isolate_from_series(m);
  const CollectiveReport r = collective_report(u, iso);
  EXPECT_EQ(r.verdict, "separable");
  EXPECT_EQ(r.ratio, 0.0);
}

TEST(MultiQubit, UnravelSplitsFullTensors) {
  const MapSeries m = unitary_series(pair(0.05).hamiltonian() + 0.3 * kron(pauli::X(), pauli::I()), 5, 0.2);
  const UnraveledSeries u = unravel(m);
  ASSERT_EQ(u.full.size(), 5);
  for (int n = 1; n <= 5; ++n)
    EXPECT_LT((u.full.at(n).matrix() - u.separable.at(n).matrix() - u.correlated.at(n).matrix()).norm(), 1e-14);
}

TEST(MultiQubit, CouplingShowsUpInGenerator) {
  const double j = 0.05, dt = 0.05;
  const MapSeries m = unitary_series(pair(j).hamiltonian(), 2, dt);
  const Isolation iso = isolate_from_series(m);
  // the correlated part of -i[J ZZ, .] dt is diagonal: +-2iJ dt on rho_{00,01} etc.
  const CMatrix dl = iso.dl_dt.matrix();
  EXPECT_NEAR(std::abs(dl(1, 1)), 2.0 * j * dt, 1e-4);
  EXPECT_NEAR(std::abs(dl(0, 0)), 0.0, 1e-12);
  // second-order coupling terms land in dK at O(dt^2)
  EXPECT_LT(frobenius_norm(iso.dk_dt2), 0.05 * frobenius_norm(iso.dl_dt));
  const CollectiveReport r = collective_report(unravel(m.truncate(1)), iso);
  EXPECT_EQ(r.verdict, "coupling-dominated");
  EXPECT_FALSE(r.to_text().empty());
}

TEST(MultiQubit, CollectiveNoiseLeavesDecoherenceFreeCoherence) {
  const MapSeries m = hierarchy_maps(pair(0.0), collective(1.0), 0.2, 6);
  for (const auto& e : m.maps) {
    // rho_{01,10} (standard index 1*4+2) is protected, rho_{00,11} is not
    EXPECT_NEAR(std::abs(e(6, 6) - 1.0), 0.0, 1e-8);
    EXPECT_LT(std::abs(e(3, 3)), 0.99);
  }
  const Isolation iso = isolate_from_series(m, nullptr);
  EXPECT_GT(frobenius_norm(iso.dk_dt2), 1e-3);
  EXPECT_TRUE(iso.short_step);
}

TEST(MultiQubit, ShortStepFlag) {
  const NoiseSpec fast = collective(5.0);
  const Isolation iso = isolate_generator_kernel(Superoperator::zero(4), Superoperator::zero(4), 0.2, &fast);
  EXPECT_FALSE(iso.short_step);
  EXPECT_NE(iso.note.find("rate*dt"), std::string::npos);
  const NoiseSpec slow = collective(1.0);
  EXPECT_TRUE(isolate_generator_kernel(Superoperator::zero(4), Superoperator::zero(4), 0.2, &slow).short_step);
}

TEST(MultiQubit, Validation) {
  MapSeries q;
  q.dt = 0.1;
  q.maps = {Superoperator::identity(2), Superoperator::identity(2)};
  EXPECT_THROW(unravel(q), DimensionError);
  EXPECT_THROW(separable_part(Superoperator::identity(2)), DimensionError);
  EXPECT_THROW(isolate_from_series(product_series(1, 0.1)), ValidationError);
}

}  // namespace
}  // namespace ttmspec
