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

#include "ttmspec/map_io.hpp"
#include "ttmspec/propagator.hpp"
#include "ttmspec/qpt.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace ttmspec {
namespace {

MapSeries sample_series(int n_qubits) {
  SystemSpec sys;
  sys.n_qubits = n_qubits;
  sys.bias.assign(static_cast<std::size_t>(n_qubits), 0.1);
  if (n_qubits == 2) sys.zz_coupling = 0.05;
  NoiseSpec n;
  n.channels.push_back({0, 'z', 1.0, 1.0, 0.0, {}, 0.0});
  n.channels.push_back({0, 'x', 0.3, 2.0, 0.5, {}, 0.0});
  return ensemble_maps(sys, n, 0.2, 3, 200, 11);
}

TEST(Qpt, BasesAreInformationallyComplete) {
  for (int q : {1, 2}) {
    const PrepBasis b = PrepBasis::for_qubits(q);
    EXPECT_EQ(b.size(), b.dim() * b.dim());
    EXPECT_LT(b.condition_number(), 100.0);
    for (int p = 0; p < b.size(); ++p) {
      EXPECT_NEAR(b.projector(p).trace().real(), 1.0, 1e-14);
      EXPECT_LT((b.projector(p) * b.projector(p) - b.projector(p)).norm(), 1e-14);
    }
  }
  EXPECT_EQ(PrepBasis::one_qubit().index_of("psi1"), 1);
  EXPECT_THROW(PrepBasis::one_qubit().index_of("psi00"), ValidationError);
  EXPECT_THROW(PrepBasis::for_qubits(3), DimensionError);
}

TEST(Qpt, PauliStrings) {
  EXPECT_EQ(pauli_strings(1).size(), 4u);
  const auto two = pauli_strings(2);
  ASSERT_EQ(two.size(), 16u);
  EXPECT_EQ(two.front(), "II");
  EXPECT_TRUE(pauli_operator("XZ").isApprox(kron(pauli::X(), pauli::Z())));
}

TEST(Qpt, ExactRoundTrip) {
  for (int q : {1, 2}) {
    const MapSeries m = sample_series(q);
    const PrepBasis b = PrepBasis::for_qubits(q);
    const MapSeries r = reconstruct_maps(simulate_qpt(m, b, 0, 1), b, m.dt);
    ASSERT_EQ(r.size(), m.size());
    EXPECT_DOUBLE_EQ(r.dt, 0.2);
    for (int k = 1; k <= m.size(); ++k)
      EXPECT_LT((r.at(k).matrix() - m.at(k).matrix()).norm(), 1e-12) << q << " qubits, k=" << k;
  }
}

TEST(Qpt, ShotNoiseShrinksWithShots) {
  const MapSeries m = sample_series(1);
  const PrepBasis b = PrepBasis::one_qubit();
  auto err = [&](std::int64_t shots) {
    const MapSeries r = reconstruct_maps(simulate_qpt(m, b, shots, 4), b);
    return (r.at(2).matrix() - m.at(2).matrix()).norm();
  };
  const double e100 = err(100), e1m = err(1000000);
  EXPECT_GT(e100, 1e-3);
  EXPECT_LT(e1m, 0.02);
  EXPECT_LT(e1m, e100);
}

TEST(Qpt, WriteParseRoundTrip) {
  const MapSeries m = sample_series(1);
  const auto records = simulate_qpt(m, PrepBasis::one_qubit(), 0, 1);
  std::stringstream ss;
  write_records(ss, records);
  const auto parsed = parse_records(ss, "mem");
  ASSERT_EQ(parsed.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(parsed[i].expectation, records[i].expectation);
    EXPECT_EQ(parsed[i].prep_label, records[i].prep_label);
    EXPECT_EQ(parsed[i].pauli, records[i].pauli);
  }
}

TEST(Qpt, IdentityStringOptional) {
  const MapSeries m = sample_series(1);
  auto records = simulate_qpt(m, PrepBasis::one_qubit(), 0, 1);
  std::erase_if(records, [](const QptRecord& r) { return r.pauli == "I"; });
  const MapSeries r = reconstruct_maps(records, PrepBasis::one_qubit());
  EXPECT_LT((r.at(1).matrix() - m.at(1).matrix()).norm(), 1e-12);
}

TEST(Qpt, IncompleteRecordsRejected) {
  const MapSeries m = sample_series(1);
  auto records = simulate_qpt(m, PrepBasis::one_qubit(), 0, 1);
  std::erase_if(records, [](const QptRecord& r) { return r.time_index == 2 && r.pauli == "X"; });
  try {
    reconstruct_maps(records, PrepBasis::one_qubit());
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("time_index 2"), std::string::npos);
  }
  auto gap = simulate_qpt(m, PrepBasis::one_qubit(), 0, 1);
  std::erase_if(gap, [](const QptRecord& r) { return r.time_index == 2; });
  EXPECT_THROW(reconstruct_maps(gap, PrepBasis::one_qubit()), ValidationError);
}

TEST(Qpt, ParseErrorsCarryLineNumbers) {
  std::stringstream ss;
  ss << kQptHeader << '\n'
     << "1,psi0,X,0.5,100\n"
     << "# comment\n"
     << "0,psi0,X,0.5,100\n"
     << "1,psi9,X,0.5,100\n"
     << "1,psi0,Q,0.5,100\n"
     << "1,psi0,X,1.5,100\n"
     << "1,psi0,X,abc,100\n"
     << "1,psi0,X,0.5\n"
     << "1,psi0,X,0.5,-3\n";
  try {
    parse_records(ss, "rec.csv");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("7 malformed line(s)"), std::string::npos) << msg;
    for (const char* want : {"rec.csv:4: bad time_index", "rec.csv:5: unknown prep_label",
                             "rec.csv:6: bad pauli", "rec.csv:7: expectation 1.5",
                             "rec.csv:8: bad expectation", "rec.csv:9: expected 5 fields",
                             "rec.csv:10: bad shots"})
      EXPECT_NE(msg.find(want), std::string::npos) << want;
    EXPECT_EQ(msg.find("rec.csv:2:"), std::string::npos);
  }
}

TEST(Qpt, ParseRejectsMissingHeader) {
  std::stringstream bad("1,psi0,X,0.5,100\n");
  EXPECT_THROW(parse_records(bad), ValidationError);
  std::stringstream empty("");
  EXPECT_THROW(parse_records(empty), ValidationError);
}

TEST(Qpt, CptpProjectionRepairsMap) {
  const Superoperator good = dephasing_map(0.3, 0.1);
  CMatrix noisy = good.matrix();
  noisy(1, 1) = noisy(2, 2) = 1.05;  // coherence growth breaks positivity
  const Superoperator bad(2, noisy);
  ASSERT_LT(min_choi_eigenvalue(bad), -1e-3);
  const CptpProjection p = project_cptp(bad, 500, 1e-10);
  EXPECT_TRUE(p.converged);
  EXPECT_GT(min_choi_eigenvalue(p.map), -1e-8);
  EXPECT_LT(trace_preservation_error(p.map), 1e-8);
  EXPECT_LT(hermiticity_preservation_error(p.map), 1e-8);

  // CPTP input is a fixed point
  const CptpProjection same = project_cptp(good);
  EXPECT_LT((same.map.matrix() - good.matrix()).norm(), 1e-8);
}

TEST(Qpt, MapJsonRoundTrip) {
  const MapSeries m = sample_series(2);
  const MapSeries back = series_from_json(nlohmann::json::parse(series_to_json(m).dump()));
  ASSERT_EQ(back.size(), m.size());
  EXPECT_EQ(back.n_traj, m.n_traj);
  for (int k = 1; k <= m.size(); ++k) EXPECT_EQ(back.at(k).matrix(), m.at(k).matrix());

  nlohmann::json j = map_to_json(m.at(1), 0.2, 1);
  j["convention"] = "column-major";
  EXPECT_THROW(map_from_json(j), ValidationError);
  j = map_to_json(m.at(1), 0.2, 1);
  j["entries"].erase(0);
  EXPECT_THROW(map_from_json(j), DimensionError);
}

}  // namespace
}  // namespace ttmspec
