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

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace ttmspec {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

/// Base class for every error raised by the library. The message names the
/// module that raised it so CLI diagnostics keep their provenance.
class Error : public std::runtime_error {
 public:
  Error(const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(module) {}
  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& module, const std::string& what, double residual)
      : Error(module, what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Hilbert-space dimension of a register of `n_qubits` qubits.
constexpr int hilbert_dim(int n_qubits) { return 1 << n_qubits; }

/// A d x d density matrix. Construction only checks shape; use diagnose()
/// for the physical invariants, since ingested tomography states are allowed
/// to violate positivity.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(CMatrix rho) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols() || (rho_.rows() != 2 && rho_.rows() != 4))
      throw DimensionError("liouville", "density matrix must be 2x2 or 4x4, got " +
                                            std::to_string(rho_.rows()) + "x" +
                                            std::to_string(rho_.cols()));
  }

  static DensityMatrix pure(const CVector& psi) {
    const CVector n = psi / psi.norm();
    return DensityMatrix(n * n.adjoint());
  }

  int dim() const { return static_cast<int>(rho_.rows()); }
  const CMatrix& matrix() const { return rho_; }
  cplx operator()(int i, int j) const { return rho_(i, j); }

  struct Diagnostics {
    double hermiticity_error;
    double trace_error;
    double min_eigenvalue;
  };

  Diagnostics diagnose() const {
    const CMatrix herm = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
    return {(rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(), std::abs(rho_.trace() - 1.0),
            es.eigenvalues().minCoeff()};
  }

 private:
  CMatrix rho_;
};

/// A d^2 x d^2 matrix acting on row-major vectorized operators:
/// composite index (i, i') -> i * d + i'. Houses dynamical maps, transfer
/// tensors and kernels alike; only maps are expected to preserve the trace.
class Superoperator {
 public:
  Superoperator() = default;
  Superoperator(int dim, CMatrix entries) : dim_(dim), m_(std::move(entries)) {
    if (m_.rows() != dim * dim || m_.cols() != dim * dim)
      throw DimensionError("liouville", "superoperator of dim " + std::to_string(dim) +
                                            " needs " + std::to_string(dim * dim) + "^2 entries");
  }

  static Superoperator identity(int dim) {
    return {dim, CMatrix::Identity(dim * dim, dim * dim)};
  }
  static Superoperator zero(int dim) { return {dim, CMatrix::Zero(dim * dim, dim * dim)}; }

  int dim() const { return dim_; }
  const CMatrix& matrix() const { return m_; }
  CMatrix& matrix() { return m_; }
  cplx operator()(int r, int c) const { return m_(r, c); }
  cplx& operator()(int r, int c) { return m_(r, c); }

  Superoperator& operator+=(const Superoperator& o) {
    check_same(o);
    m_ += o.m_;
    return *this;
  }
  Superoperator& operator-=(const Superoperator& o) {
    check_same(o);
    m_ -= o.m_;
    return *this;
  }
  Superoperator& operator*=(cplx s) {
    m_ *= s;
    return *this;
  }

  friend Superoperator operator+(Superoperator a, const Superoperator& b) { return a += b; }
  friend Superoperator operator-(Superoperator a, const Superoperator& b) { return a -= b; }
  friend Superoperator operator*(Superoperator a, cplx s) { return a *= s; }
  friend Superoperator operator*(cplx s, Superoperator a) { return a *= s; }
  friend Superoperator operator*(Superoperator a, double s) { return a *= s; }
  friend Superoperator operator*(double s, Superoperator a) { return a *= s; }

  void check_same(const Superoperator& o) const {
    if (o.dim_ != dim_)
      throw DimensionError("liouville", "superoperator dims differ: " + std::to_string(dim_) +
                                            " vs " + std::to_string(o.dim_));
  }

 private:
  int dim_ = 0;
  CMatrix m_;
};

/// Reshuffled process matrix X indexed by operator pairs A_k = |k><k'|.
class ChoiMatrix {
 public:
  ChoiMatrix() = default;
  ChoiMatrix(int dim, CMatrix entries) : dim_(dim), m_(std::move(entries)) {
    if (m_.rows() != dim * dim || m_.cols() != dim * dim)
      throw DimensionError("liouville", "Choi matrix of dim " + std::to_string(dim) +
                                            " needs " + std::to_string(dim * dim) + "^2 entries");
  }
  int dim() const { return dim_; }
  const CMatrix& matrix() const { return m_; }

 private:
  int dim_ = 0;
  CMatrix m_;
};

/// Bloch-vector form r -> M r + c of a qubit map.
struct BlochAffine {
  Eigen::Matrix3d M = Eigen::Matrix3d::Identity();
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
};

namespace pauli {

inline CMatrix I() { return CMatrix::Identity(2, 2); }
inline CMatrix X() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline CMatrix Y() {
  CMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}
inline CMatrix Z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// Pauli matrix by axis: 0 = I, 1 = x, 2 = y, 3 = z.
inline CMatrix by_index(int a) {
  switch (a) {
    case 0: return I();
    case 1: return X();
    case 2: return Y();
    case 3: return Z();
    default: throw ValidationError("core", "Pauli index out of range: " + std::to_string(a));
  }
}

inline CMatrix by_label(char c) {
  switch (c) {
    case 'I': return I();
    case 'X': return X();
    case 'Y': return Y();
    case 'Z': return Z();
    default: throw ValidationError("core", std::string("unknown Pauli label '") + c + "'");
  }
}

}  // namespace pauli

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Operator acting as `op` on qubit `q` (0 = leftmost tensor factor) of an
/// `n_qubits` register.
inline CMatrix embed(const CMatrix& op, int q, int n_qubits) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (int k = 0; k < n_qubits; ++k) out = kron(out, k == q ? op : pauli::I());
  return out;
}

}  // namespace ttmspec
