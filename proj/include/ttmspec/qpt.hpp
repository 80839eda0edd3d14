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

// Process tomography: preparation bases, Pauli-expectation records, linear
// inversion to superoperators, and an opt-in CPTP projection.

#pragma once

#include "ttmspec/liouville.hpp"
#include "ttmspec/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace ttmspec {

/// d^2 labeled pure preparation states whose projectors span operator space.
class PrepBasis {
 public:
  static PrepBasis one_qubit() {
    const double r = 1.0 / std::sqrt(2.0);
    PrepBasis b(1);
    b.add("psi0", ket({1, 0}));
    b.add("psi1", ket({0, 1}));
    b.add("psiX", ket({r, r}));
    b.add("psiY", ket({r, kI * r}));
    b.finish();
    return b;
  }

  static PrepBasis two_qubit() {
    const double r = 1.0 / std::sqrt(2.0);
    const cplx i = kI * r;
    PrepBasis b(2);
    b.add("psi00", ket({1, 0, 0, 0}));
    b.add("psi01", ket({0, 1, 0, 0}));
    b.add("psi10", ket({0, 0, 1, 0}));
    b.add("psi11", ket({0, 0, 0, 1}));
    b.add("psi0X", ket({r, r, 0, 0}));
    b.add("psi0Y", ket({r, i, 0, 0}));
    b.add("psi1X", ket({0, 0, r, r}));
    b.add("psi1Y", ket({0, 0, r, i}));
    b.add("psiX0", ket({r, 0, r, 0}));
    b.add("psiY0", ket({r, 0, i, 0}));
    b.add("psiX1", ket({0, r, 0, r}));
    b.add("psiY1", ket({0, r, 0, i}));
    b.add("Phi", ket({r, 0, 0, r}));
    b.add("Psi", ket({0, r, r, 0}));
    b.add("PhiStar", ket({r, 0, 0, i}));
    b.add("PsiStar", ket({0, r, i, 0}));
    b.finish();
    return b;
  }

  static PrepBasis for_qubits(int n_qubits) {
    if (n_qubits == 1) return one_qubit();
    if (n_qubits == 2) return two_qubit();
    throw DimensionError("qpt", "preparation bases exist for 1 or 2 qubits");
  }

  int n_qubits() const { return n_qubits_; }
  int dim() const { return hilbert_dim(n_qubits_); }
  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const CMatrix& projector(int p) const { return projectors_[static_cast<std::size_t>(p)]; }

  int index_of(const std::string& label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end())
      throw ValidationError("qpt", "unknown preparation label '" + label + "' for " +
                                       std::to_string(n_qubits_) + "-qubit basis");
    return static_cast<int>(it - labels_.begin());
  }

  /// Columns are vec(|psi_p><psi_p|).
  const CMatrix& gram() const { return gram_; }
  double condition_number() const { return cond_; }

  /// Superoperator E with E vec(rho_p) = vec(out[p]) for every preparation.
  Superoperator assemble(const std::vector<CMatrix>& out) const {
    if (static_cast<int>(out.size()) != size())
      throw DimensionError("qpt", "need one output state per preparation");
    const int d = dim();
    CMatrix y(d * d, size());
    for (int p = 0; p < size(); ++p) y.col(p) = vec(out[static_cast<std::size_t>(p)]);
    return {d, y * inverse_};
  }

 private:
  explicit PrepBasis(int n) : n_qubits_(n) {}

  static CVector ket(std::initializer_list<cplx> amps) {
    CVector v(static_cast<Eigen::Index>(amps.size()));
    Eigen::Index i = 0;
    for (const auto& a : amps) v(i++) = a;
    return v;
  }

  void add(std::string label, const CVector& psi) {
    labels_.push_back(std::move(label));
    projectors_.push_back(DensityMatrix::pure(psi).matrix());
  }

  void finish() {
    const int d = dim();
    gram_.resize(d * d, size());
    for (int p = 0; p < size(); ++p) gram_.col(p) = vec(projectors_[static_cast<std::size_t>(p)]);
    Eigen::JacobiSVD<CMatrix> svd(gram_);
    const auto& sv = svd.singularValues();
    cond_ = sv(0) / sv(sv.size() - 1);
    inverse_ = gram_.inverse();
  }

  int n_qubits_;
  std::vector<std::string> labels_;
  std::vector<CMatrix> projectors_;
  CMatrix gram_;
  CMatrix inverse_;
  double cond_ = 0.0;
};

/// Every n-qubit Pauli string in lexicographic order over I, X, Y, Z.
inline std::vector<std::string> pauli_strings(int n_qubits) {
  std::vector<std::string> out{""};
  for (int q = 0; q < n_qubits; ++q) {
    std::vector<std::string> next;
    for (const auto& s : out)
      for (char c : {'I', 'X', 'Y', 'Z'}) next.push_back(s + c);
    out = std::move(next);
  }
  return out;
}

inline CMatrix pauli_operator(const std::string& s) {
  CMatrix op = CMatrix::Identity(1, 1);
  for (char c : s) op = kron(op, pauli::by_label(c));
  return op;
}

struct QptRecord {
  int time_index = 0;
  std::string prep_label;
  std::string pauli;
  double expectation = 0.0;
  std::int64_t shots = 0;  // 0 = exact expectation
};

/// Expectations Tr(P E_k rho_p) for every time, preparation and Pauli string,
/// binomially sampled with `shots` repetitions when shots > 0.
inline std::vector<QptRecord> simulate_qpt(const MapSeries& maps, const PrepBasis& basis,
                                           std::int64_t shots, std::uint64_t seed) {
  if (shots < 0) throw ValidationError("qpt", "shots must be >= 0");
  if (maps.dim() != basis.dim())
    throw DimensionError("qpt", "map dim " + std::to_string(maps.dim()) +
                                    " does not match basis dim " + std::to_string(basis.dim()));
  const auto strings = pauli_strings(basis.n_qubits());
  std::vector<CMatrix> ops;
  for (const auto& s : strings) ops.push_back(pauli_operator(s));

  std::vector<QptRecord> out;
  std::mt19937_64 rng(seed);
  for (int k = 1; k <= maps.size(); ++k)
    for (int p = 0; p < basis.size(); ++p) {
      const CMatrix rho = apply_to_operator(maps.at(k), basis.projector(p));
      for (std::size_t s = 0; s < strings.size(); ++s) {
        double e = (ops[s] * rho).trace().real();
        if (shots > 0) {
          const double prob = std::clamp(0.5 * (1.0 + e), 0.0, 1.0);
          std::binomial_distribution<std::int64_t> draw(shots, prob);
          e = 2.0 * static_cast<double>(draw(rng)) / static_cast<double>(shots) - 1.0;
        }
        out.push_back({k, basis.labels()[static_cast<std::size_t>(p)], strings[s], e, shots});
      }
    }
  return out;
}

/// Linear-inversion reconstruction. Repeated (prep, Pauli) records are
/// averaged; the all-identity string may be omitted and then defaults to 1.
inline MapSeries reconstruct_maps(const std::vector<QptRecord>& records, const PrepBasis& basis,
                                  double dt = 1.0) {
  if (basis.condition_number() > 1e8)
    throw ValidationError("qpt", "preparation basis is ill-conditioned");
  const int n = basis.n_qubits();
  const int d = basis.dim();
  const auto strings = pauli_strings(n);

  // time -> prep -> pauli -> (sum, count)
  std::map<int, std::vector<std::vector<std::pair<double, int>>>> table;
  for (const auto& r : records) {
    if (static_cast<int>(r.pauli.size()) != n)
      throw ValidationError("qpt", "Pauli string '" + r.pauli + "' does not match " +
                                       std::to_string(n) + " qubits");
    auto& slot = table[r.time_index];
    if (slot.empty())
      slot.assign(static_cast<std::size_t>(basis.size()),
                  std::vector<std::pair<double, int>>(strings.size(), {0.0, 0}));
    const auto s = static_cast<std::size_t>(std::find(strings.begin(), strings.end(), r.pauli) -
                                            strings.begin());
    if (s == strings.size()) throw ValidationError("qpt", "bad Pauli string '" + r.pauli + "'");
    auto& cell = slot[static_cast<std::size_t>(basis.index_of(r.prep_label))][s];
    cell.first += r.expectation;
    cell.second += 1;
  }
  if (table.empty()) throw ValidationError("qpt", "no records");

  MapSeries out;
  out.dt = dt;
  int expect = table.begin()->first;
  if (expect != 1) throw ValidationError("qpt", "time indices must start at 1");
  const std::string identity(static_cast<std::size_t>(n), 'I');
  for (const auto& [k, slot] : table) {
    if (k != expect) throw ValidationError("qpt", "missing time index " + std::to_string(expect));
    ++expect;
    std::vector<std::string> missing;
    std::vector<CMatrix> states;
    for (int p = 0; p < basis.size(); ++p) {
      CMatrix rho = CMatrix::Zero(d, d);
      for (std::size_t s = 0; s < strings.size(); ++s) {
        const auto& [sum, count] = slot[static_cast<std::size_t>(p)][s];
        double e = 0.0;
        if (count > 0)
          e = sum / count;
        else if (strings[s] == identity)
          e = 1.0;
        else {
          missing.push_back("(" + basis.labels()[static_cast<std::size_t>(p)] + "," + strings[s] + ")");
          continue;
        }
        rho += e * pauli_operator(strings[s]);
      }
      states.push_back(rho / static_cast<double>(d));
    }
    if (!missing.empty()) {
      std::string list;
      for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? " " : "") + missing[i];
      if (missing.size() > 20) list += " ...";
      throw ValidationError("qpt", "incomplete records at time_index " + std::to_string(k) + ": " +
                                       std::to_string(missing.size()) + " missing " + list);
    }
    out.maps.push_back(basis.assemble(states));
  }
  return out;
}

// --- CPTP projection --------------------------------------------------------

struct CptpProjection {
  Superoperator map;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Nearest CPTP map in Choi-Frobenius distance by Dykstra alternating
/// projection between the PSD cone and the affine set {X = X^dag, Tr_out X = I}.
inline CptpProjection project_cptp(const Superoperator& s, int max_iter = 200, double tol = 1e-9) {
  const int d = s.dim();
  const int n = d * d;
  auto psd = [](const CMatrix& x) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (x + x.adjoint()));
    return CMatrix(es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
                   es.eigenvectors().adjoint());
  };
  auto affine = [d, n](const CMatrix& x) {
    CMatrix h = 0.5 * (x + x.adjoint());
    CMatrix tr = CMatrix::Zero(d, d);  // Tr over the output index
    for (int i = 0; i < d; ++i) tr += h.block(i * d, i * d, d, d);
    const CMatrix corr = kron(CMatrix::Identity(d, d), (tr - CMatrix::Identity(d, d)) / d);
    return CMatrix(h - corr);
  };
  auto violation = [](const CMatrix& x) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (x + x.adjoint()), Eigen::EigenvaluesOnly);
    return std::max(0.0, -es.eigenvalues().minCoeff());
  };

  CMatrix x = to_choi(s).matrix();
  CMatrix p = CMatrix::Zero(n, n);
  CMatrix q = CMatrix::Zero(n, n);
  CptpProjection out;
  for (int it = 1; it <= max_iter; ++it) {
    const CMatrix y = psd(x + p);
    p = x + p - y;
    const CMatrix next = affine(y + q);
    q = y + q - next;
    out.residual = std::max((next - x).norm(), violation(next));
    x = next;
    out.iterations = it;
    if (out.residual < tol) {
      out.converged = true;
      break;
    }
  }
  out.map = from_choi(ChoiMatrix(d, x));
  return out;
}

// --- Record files -----------------------------------------------------------

inline constexpr const char* kQptHeader = "time_index,prep_label,pauli,expectation,shots";

inline bool is_known_prep_label(const std::string& label) {
  static const std::vector<std::string> known = [] {
    auto a = PrepBasis::one_qubit().labels();
    const auto b = PrepBasis::two_qubit().labels();
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }();
  return std::find(known.begin(), known.end(), label) != known.end();
}

/// Parses a record stream. Lines starting with '#' are metadata and skipped.
/// Every malformed line is reported with its line number.
inline std::vector<QptRecord> parse_records(std::istream& in, const std::string& source = "<input>") {
  std::vector<QptRecord> out;
  std::vector<std::string> problems;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  auto fail = [&](const std::string& what) {
    problems.push_back(source + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line != kQptHeader) {
        fail("expected header '" + std::string(kQptHeader) + "'");
        break;
      }
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 5) {
      fail("expected 5 fields, got " + std::to_string(f.size()));
      continue;
    }
    QptRecord r;
    try {
      std::size_t pos = 0;
      r.time_index = std::stoi(f[0], &pos);
      if (pos != f[0].size() || r.time_index < 1) throw std::invalid_argument("t");
    } catch (const std::exception&) {
      fail("bad time_index '" + f[0] + "'");
      continue;
    }
    r.prep_label = f[1];
    if (!is_known_prep_label(r.prep_label)) {
      fail("unknown prep_label '" + f[1] + "'");
      continue;
    }
    r.pauli = f[2];
    if (r.pauli.empty() || r.pauli.size() > 2 ||
        r.pauli.find_first_not_of("IXYZ") != std::string::npos) {
      fail("bad pauli '" + f[2] + "'");
      continue;
    }
    try {
      std::size_t pos = 0;
      r.expectation = std::stod(f[3], &pos);
      if (pos != f[3].size() || !std::isfinite(r.expectation)) throw std::invalid_argument("e");
    } catch (const std::exception&) {
      fail("bad expectation '" + f[3] + "'");
      continue;
    }
    if (std::abs(r.expectation) > 1.0 + 1e-12) {
      fail("expectation " + f[3] + " outside [-1, 1]");
      continue;
    }
    try {
      std::size_t pos = 0;
      r.shots = std::stoll(f[4], &pos);
      if (pos != f[4].size() || r.shots < 0) throw std::invalid_argument("s");
    } catch (const std::exception&) {
      fail("bad shots '" + f[4] + "'");
      continue;
    }
    out.push_back(std::move(r));
  }
  if (!header_seen && problems.empty()) problems.push_back(source + ": empty record file");
  if (!problems.empty()) {
    std::string msg = std::to_string(problems.size()) + " malformed line(s)";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ValidationError("qpt", msg);
  }
  return out;
}

inline std::vector<QptRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open '" + path + "'");
  return parse_records(in, path);
}

inline void write_records(std::ostream& out, const std::vector<QptRecord>& records) {
  out << kQptHeader << '\n';
  char buf[64];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.17g", r.expectation);
    out << r.time_index << ',' << r.prep_label << ',' << r.pauli << ',' << buf << ',' << r.shots
        << '\n';
  }
}

}  // namespace ttmspec
