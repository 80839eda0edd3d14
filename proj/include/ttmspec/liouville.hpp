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

// State and process representations: row-major vectorization, superoperator
// algebra, Choi reshuffling, Bloch affine form and bipartite factorization.

#pragma once

#include "ttmspec/core.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace ttmspec {

/// Row-major vectorization: vec(rho)[i * d + i'] = rho(i, i').
inline CVector vec(const CMatrix& rho) {
  const auto d = rho.rows();
  CVector v(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) v(i * d + j) = rho(i, j);
  return v;
}

inline CMatrix unvec(const CVector& v, int d) {
  if (v.size() != d * d)
    throw DimensionError("liouville", "vector of length " + std::to_string(v.size()) +
                                          " cannot be reshaped to " + std::to_string(d) + "x" +
                                          std::to_string(d));
  CMatrix rho(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) rho(i, j) = v(i * d + j);
  return rho;
}

/// Superoperator of X -> A X.
inline Superoperator left_mul(const CMatrix& a) {
  const int d = static_cast<int>(a.rows());
  return {d, kron(a, CMatrix::Identity(d, d))};
}

/// Superoperator of X -> X B.
inline Superoperator right_mul(const CMatrix& b) {
  const int d = static_cast<int>(b.rows());
  return {d, kron(CMatrix::Identity(d, d), b.transpose())};
}

/// Superoperator of X -> [H, X].
inline Superoperator commutator(const CMatrix& h) { return left_mul(h) - right_mul(h); }

/// The Liouvillian -i[H, .] of a system Hamiltonian.
inline Superoperator liouvillian(const CMatrix& h) { return commutator(h) * (-kI); }

/// Superoperator of X -> U X U^dagger.
inline Superoperator unitary_map(const CMatrix& u) {
  const int d = static_cast<int>(u.rows());
  return {d, kron(u, u.conjugate())};
}

/// Qubit pure-dephasing map: populations fixed, rho01 -> e^{-gamma + i phase} rho01.
/// gamma = infinity gives full dephasing.
inline Superoperator dephasing_map(double gamma, double phase) {
  Superoperator s = Superoperator::identity(2);
  const cplx f = std::isinf(gamma) ? cplx(0.0) : std::exp(cplx(-gamma, phase));
  s(1, 1) = f;
  s(2, 2) = std::conj(f);
  return s;
}

inline DensityMatrix apply(const Superoperator& map, const DensityMatrix& state) {
  if (map.dim() != state.dim())
    throw DimensionError("liouville", "map dim " + std::to_string(map.dim()) +
                                          " does not match state dim " +
                                          std::to_string(state.dim()));
  return DensityMatrix(unvec(map.matrix() * vec(state.matrix()), state.dim()));
}

/// Raw operator application, for inputs that are not states (basis operators,
/// Pauli matrices).
inline CMatrix apply_to_operator(const Superoperator& map, const CMatrix& op) {
  if (op.rows() != map.dim())
    throw DimensionError("liouville", "operator does not match map dim");
  return unvec(map.matrix() * vec(op), map.dim());
}

/// Matrix product a * b: apply b first, then a.
inline Superoperator compose(const Superoperator& a, const Superoperator& b) {
  a.check_same(b);
  return {a.dim(), a.matrix() * b.matrix()};
}

inline double frobenius_norm(const Superoperator& s) { return s.matrix().norm(); }

/// E_{(i,i'),(j,j')} = X_{(i,j),(i',j')}.
inline ChoiMatrix to_choi(const Superoperator& s) {
  const int d = s.dim();
  CMatrix x(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int ip = 0; ip < d; ++ip)
      for (int j = 0; j < d; ++j)
        for (int jp = 0; jp < d; ++jp) x(i * d + j, ip * d + jp) = s(i * d + ip, j * d + jp);
  return {d, std::move(x)};
}

inline Superoperator from_choi(const ChoiMatrix& x) {
  const int d = x.dim();
  CMatrix e(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int ip = 0; ip < d; ++ip)
      for (int j = 0; j < d; ++j)
        for (int jp = 0; jp < d; ++jp) e(i * d + ip, j * d + jp) = x.matrix()(i * d + j, ip * d + jp);
  return {d, std::move(e)};
}

/// Largest violation of sum_i E[(i,i),(j,j')] = delta_{j,j'}.
inline double trace_preservation_error(const Superoperator& s) {
  const int d = s.dim();
  double worst = 0.0;
  for (int j = 0; j < d; ++j)
    for (int jp = 0; jp < d; ++jp) {
      cplx sum = 0.0;
      for (int i = 0; i < d; ++i) sum += s(i * d + i, j * d + jp);
      worst = std::max(worst, std::abs(sum - (j == jp ? 1.0 : 0.0)));
    }
  return worst;
}

/// Largest violation of E[(i,i'),(j,j')] = conj(E[(i',i),(j',j)]).
inline double hermiticity_preservation_error(const Superoperator& s) {
  const int d = s.dim();
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int ip = 0; ip < d; ++ip)
      for (int j = 0; j < d; ++j)
        for (int jp = 0; jp < d; ++jp)
          worst = std::max(worst, std::abs(s(i * d + ip, j * d + jp) -
                                           std::conj(s(ip * d + i, jp * d + j))));
  return worst;
}

/// Minimum eigenvalue of the Hermitian part of the Choi matrix; negative
/// values flag a map that is not completely positive.
inline double min_choi_eigenvalue(const Superoperator& s) {
  const CMatrix x = to_choi(s).matrix();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (x + x.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

struct MapDiagnostics {
  double trace_error;
  double hermiticity_error;
  double min_choi_eigenvalue;
};

inline MapDiagnostics diagnose(const Superoperator& s) {
  return {trace_preservation_error(s), hermiticity_preservation_error(s), min_choi_eigenvalue(s)};
}

// --- Bloch form (qubits) ----------------------------------------------------

inline Eigen::Vector3d bloch_vector(const CMatrix& rho) {
  Eigen::Vector3d r;
  for (int a = 0; a < 3; ++a) r(a) = (pauli::by_index(a + 1) * rho).trace().real();
  return r;
}

/// r_n = M r_0 + c with r^a = Tr(sigma^a rho) and rho = (I + r.sigma) / 2.
inline BlochAffine bloch_affine(const Superoperator& s) {
  if (s.dim() != 2) throw DimensionError("liouville", "Bloch form needs a qubit map");
  BlochAffine out;
  out.c = 0.5 * bloch_vector(apply_to_operator(s, pauli::I()));
  for (int b = 0; b < 3; ++b)
    out.M.col(b) = 0.5 * bloch_vector(apply_to_operator(s, pauli::by_index(b + 1)));
  return out;
}

/// Trace-preserving qubit map with the given affine action.
inline Superoperator from_bloch(const BlochAffine& a) {
  // Images of I and the Paulis, then expand |j><j'| in that basis.
  std::array<CMatrix, 4> image;
  image[0] = pauli::I();
  for (int k = 0; k < 3; ++k) image[0] += a.c(k) * pauli::by_index(k + 1);
  for (int b = 0; b < 3; ++b) {
    image[b + 1] = CMatrix::Zero(2, 2);
    for (int k = 0; k < 3; ++k) image[b + 1] += a.M(k, b) * pauli::by_index(k + 1);
  }
  CMatrix e(4, 4);
  for (int j = 0; j < 2; ++j)
    for (int jp = 0; jp < 2; ++jp) {
      CMatrix basis = CMatrix::Zero(2, 2);
      basis(j, jp) = 1.0;
      CMatrix out = CMatrix::Zero(2, 2);
      for (int p = 0; p < 4; ++p) out += 0.5 * (pauli::by_index(p) * basis).trace() * image[p];
      e.col(j * 2 + jp) = vec(out);
    }
  return {2, std::move(e)};
}

// --- Bipartite structure (two qubits) ---------------------------------------

/// Permutation from the standard two-qubit Liouville index
/// (i1 i2; i1' i2') to the re-indexed order (i1, i1'; i2, i2').
inline std::array<int, 16> bipartite_permutation() {
  std::array<int, 16> p{};
  for (int i1 = 0; i1 < 2; ++i1)
    for (int i2 = 0; i2 < 2; ++i2)
      for (int j1 = 0; j1 < 2; ++j1)
        for (int j2 = 0; j2 < 2; ++j2) {
          const int standard = (i1 * 2 + i2) * 4 + (j1 * 2 + j2);
          const int reindexed = (i1 * 2 + j1) * 4 + (i2 * 2 + j2);
          p[standard] = reindexed;
        }
  return p;
}

/// Rows and columns of a 16 x 16 matrix moved into the re-indexed basis.
inline CMatrix reindex_bipartite(const CMatrix& m) {
  if (m.rows() != 16 || m.cols() != 16)
    throw DimensionError("liouville", "re-indexing needs a 16x16 matrix");
  const auto p = bipartite_permutation();
  CMatrix out(16, 16);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c) out(p[r], p[c]) = m(r, c);
  return out;
}

inline CMatrix reindex_bipartite_inverse(const CMatrix& m) {
  const auto p = bipartite_permutation();
  CMatrix out(16, 16);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c) out(r, c) = m(p[r], p[c]);
  return out;
}

/// Choi matrix of the product channel x1 (x) x2 in the standard basis.
inline ChoiMatrix tensor(const ChoiMatrix& x1, const ChoiMatrix& x2) {
  if (x1.dim() != 2 || x2.dim() != 2)
    throw DimensionError("liouville", "tensor product is defined for qubit factors");
  return {4, reindex_bipartite_inverse(kron(x1.matrix(), x2.matrix()))};
}

/// Superoperator of the product channel e1 (x) e2.
inline Superoperator tensor(const Superoperator& e1, const Superoperator& e2) {
  return from_choi(tensor(to_choi(e1), to_choi(e2)));
}

struct BipartiteFactors {
  ChoiMatrix first;       // Tr_2 X / 2
  ChoiMatrix second;      // Tr_1 X / 2
  ChoiMatrix correlated;  // X - first (x) second, standard basis
};

inline BipartiteFactors factorize_bipartite(const ChoiMatrix& x) {
  if (x.dim() != 4) throw DimensionError("liouville", "bipartite factorization needs dim 4");
  const CMatrix re = reindex_bipartite(x.matrix());
  CMatrix x1 = CMatrix::Zero(4, 4);
  CMatrix x2 = CMatrix::Zero(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int k = 0; k < 4; ++k) {
        x1(a, b) += re(a * 4 + k, b * 4 + k);
        x2(a, b) += re(k * 4 + a, k * 4 + b);
      }
  ChoiMatrix first(2, x1 / 2.0);
  ChoiMatrix second(2, x2 / 2.0);
  ChoiMatrix product = tensor(first, second);
  return {std::move(first), std::move(second), ChoiMatrix(4, x.matrix() - product.matrix())};
}

}  // namespace ttmspec
