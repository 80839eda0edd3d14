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

#include "ttmspec/liouville.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ttmspec {
namespace {

CMatrix random_state(int d, unsigned seed) {
  std::srand(seed);
  CMatrix a = CMatrix::Random(d, d);
  CMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

CMatrix random_unitary(int d, unsigned seed) {
  std::srand(seed);
  Eigen::HouseholderQR<CMatrix> qr(CMatrix::Random(d, d));
  return qr.householderQ();
}

TEST(Liouville, VecIsRowMajor) {
  CMatrix m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  const CVector v = vec(m);
  EXPECT_EQ(v(1), cplx(2.0));
  EXPECT_EQ(v(2), cplx(3.0));
  EXPECT_TRUE(unvec(v, 2).isApprox(m));
  EXPECT_THROW(unvec(v, 3), DimensionError);
}

TEST(Liouville, LeftRightMultiplication) {
  const CMatrix a = random_unitary(2, 3), b = random_unitary(2, 4), x = random_state(2, 5);
  EXPECT_TRUE(apply_to_operator(left_mul(a), x).isApprox(a * x, 1e-12));
  EXPECT_TRUE(apply_to_operator(right_mul(b), x).isApprox(x * b, 1e-12));
  EXPECT_TRUE(apply_to_operator(liouvillian(a), x).isApprox(-kI * (a * x - x * a), 1e-12));
}

TEST(Liouville, DephasingMapActsOnCoherenceOnly) {
  const Superoperator s = dephasing_map(0.5, 0.4);
  CMatrix rho(2, 2);
  rho << 0.6, cplx(0.2, 0.1), cplx(0.2, -0.1), 0.4;
  const CMatrix out = apply(s, DensityMatrix(rho)).matrix();
  const cplx f = std::exp(cplx(-0.5, 0.4));
  EXPECT_NEAR(std::abs(out(0, 1) - f * rho(0, 1)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(out(1, 0) - std::conj(f) * rho(1, 0)), 0.0, 1e-14);
  EXPECT_NEAR(out(0, 0).real(), 0.6, 1e-15);
  EXPECT_NEAR(out(1, 1).real(), 0.4, 1e-15);
  // infinite gamma kills the coherence
  EXPECT_EQ(apply(dephasing_map(INFINITY, 0.0), DensityMatrix(rho))(0, 1), cplx(0.0));
}

TEST(Liouville, ChoiRoundTripAndDiagnostics) {
  const Superoperator u = unitary_map(random_unitary(2, 7));
  EXPECT_TRUE(from_choi(to_choi(u)).matrix().isApprox(u.matrix()));
  const MapDiagnostics d = diagnose(u);
  EXPECT_LT(d.trace_error, 1e-12);
  EXPECT_LT(d.hermiticity_error, 1e-12);
  EXPECT_GT(d.min_choi_eigenvalue, -1e-12);

  // transpose is positive but not completely positive
  CMatrix t = CMatrix::Zero(4, 4);
  t(0, 0) = t(3, 3) = 1.0;
  t(1, 2) = t(2, 1) = 1.0;
  EXPECT_LT(min_choi_eigenvalue(Superoperator(2, t)), -0.5);
  EXPECT_LT(trace_preservation_error(Superoperator(2, t)), 1e-15);
}

TEST(Liouville, TraceViolationDetected) {
  Superoperator s = Superoperator::identity(2) * 0.9;
  EXPECT_NEAR(trace_preservation_error(s), 0.1, 1e-15);
}

TEST(Liouville, BlochRoundTrip) {
  const Superoperator u = compose(dephasing_map(0.3, 0.2), unitary_map(random_unitary(2, 11)));
  const BlochAffine a = bloch_affine(u);
  EXPECT_TRUE(from_bloch(a).matrix().isApprox(u.matrix(), 1e-12));
  const CMatrix rho = random_state(2, 12);
  const Eigen::Vector3d r = a.M * bloch_vector(rho) + a.c;
  EXPECT_LT((bloch_vector(apply(u, DensityMatrix(rho)).matrix()) - r).norm(), 1e-12);
  EXPECT_NEAR(a.M.determinant(), std::exp(-0.6), 1e-12);
}

TEST(Liouville, BipartitePermutationMovesExpectedEntry) {
  const auto p = bipartite_permutation();
  // rho_{00,11}: i1=0 i2=0 j1=1 j2=1 -> (0*2+1)*4 + (0*2+1) = 5
  EXPECT_EQ(p[3], 5);
  // rho_{01,10}: standard 1*4+2 = 6 -> (0*2+1)*4 + (1*2+0) = 6
  EXPECT_EQ(p[6], 6);
  CMatrix m = CMatrix::Random(16, 16);
  EXPECT_TRUE(reindex_bipartite_inverse(reindex_bipartite(m)).isApprox(m));
}

TEST(Liouville, ProductChannelFactorizes) {
  const CMatrix u1 = random_unitary(2, 21), u2 = random_unitary(2, 22);
  const Superoperator e1 = compose(dephasing_map(0.2, 0.0), unitary_map(u1));
  const Superoperator e2 = unitary_map(u2);
  const Superoperator prod = tensor(e1, e2);
  // product of unitaries agrees with the kron unitary
  EXPECT_TRUE(tensor(unitary_map(u1), e2).matrix().isApprox(unitary_map(kron(u1, u2)).matrix(), 1e-12));
  const BipartiteFactors f = factorize_bipartite(to_choi(prod));
  EXPECT_LT(f.correlated.matrix().norm(), 1e-12);
  EXPECT_TRUE(from_choi(f.first).matrix().isApprox(e1.matrix(), 1e-12));
  EXPECT_TRUE(from_choi(f.second).matrix().isApprox(e2.matrix(), 1e-12));
}

TEST(Liouville, EntanglingMapIsCorrelated) {
  CMatrix cz = CMatrix::Identity(4, 4);
  cz(3, 3) = -1.0;
  const BipartiteFactors f = factorize_bipartite(to_choi(unitary_map(cz)));
  EXPECT_GT(f.correlated.matrix().norm(), 0.1);
}

TEST(Liouville, DimensionChecks) {
  EXPECT_THROW(DensityMatrix(CMatrix::Identity(3, 3)), DimensionError);
  EXPECT_THROW(Superoperator(2, CMatrix::Identity(3, 3)), DimensionError);
  EXPECT_THROW(compose(Superoperator::identity(2), Superoperator::identity(4)), DimensionError);
  EXPECT_THROW(bloch_affine(Superoperator::identity(4)), DimensionError);
  EXPECT_THROW(apply(Superoperator::identity(4), DensityMatrix::pure(CVector::Unit(2, 0))),
               DimensionError);
}

TEST(Liouville, DensityDiagnostics) {
  const DensityMatrix rho = DensityMatrix::pure(CVector::Ones(2));
  const auto d = rho.diagnose();
  EXPECT_LT(d.trace_error, 1e-15);
  EXPECT_NEAR(d.min_eigenvalue, 0.0, 1e-14);
  CMatrix bad(2, 2);
  bad << 1.2, 0.0, 0.0, -0.2;
  EXPECT_NEAR(DensityMatrix(bad).diagnose().min_eigenvalue, -0.2, 1e-14);
}

}  // namespace
}  // namespace ttmspec
