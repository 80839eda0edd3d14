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

// Run configuration, batch pipeline and figure presets.

#include "ttmspec/map_io.hpp"
#include "ttmspec/qpt.hpp"
#include "ttmspec/report.hpp"
#include "ttmspec/scenarios.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace ttmspec {

enum class Mode { Simulate, Ttm, Nonmarkov, Spectroscopy, Twoqubit, Ingest, Xy4 };
enum class GroundTruth { Trajectory, Analytic, Hierarchy };

inline const std::vector<std::pair<Mode, std::string>>& mode_names() {
  static const std::vector<std::pair<Mode, std::string>> names = {
      {Mode::Simulate, "simulate"},         {Mode::Ttm, "ttm"},
      {Mode::Nonmarkov, "nonmarkov"},       {Mode::Spectroscopy, "spectroscopy"},
      {Mode::Twoqubit, "twoqubit"},         {Mode::Ingest, "ingest"},
      {Mode::Xy4, "xy4"}};
  return names;
}

inline std::string to_string(Mode m) {
  for (const auto& [k, v] : mode_names())
    if (k == m) return v;
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  for (const auto& [k, v] : mode_names())
    if (v == s) return k;
  throw ValidationError("cli", "unknown mode '" + s + "'");
}

inline std::string to_string(GroundTruth g) {
  switch (g) {
    case GroundTruth::Analytic: return "analytic";
    case GroundTruth::Hierarchy: return "hierarchy";
    default: return "trajectory";
  }
}

inline GroundTruth parse_ground_truth(const std::string& s) {
  if (s == "trajectory") return GroundTruth::Trajectory;
  if (s == "analytic") return GroundTruth::Analytic;
  if (s == "hierarchy") return GroundTruth::Hierarchy;
  throw ValidationError("cli", "expected trajectory, analytic or hierarchy, got '" +
                                   s + "'");
}

struct DefaultEntry {
  const char* field;
  const char* value;
  const char* meaning;
};

/// Every default in one place; the README table mirrors this list.
inline const std::vector<DefaultEntry>& default_table() {
  static const std::vector<DefaultEntry> t = {
      {"mode", "simulate", "pipeline to run"},
      {"system.n_qubits", "1", "1 or 2"},
      {"system.bias", "[0.1]", "omega_i in H_s = sum omega_i sigma^z_i"},
      {"system.zz_coupling", "0", "omega_12 sigma^z_1 sigma^z_2 (two qubits)"},
      {"noise.channels", "[]", "{qubit, axis, variance, kappa, omega_c}; C(t) = variance e^{-kappa t} cos(omega_c t)"},
      {"noise.channels[].kappa", "1", "decay rate"},
      {"noise.channels[].omega_c", "0", "modulation frequency"},
      {"noise.cross_corr", "independent", "equal-time covariance matrix between channels"},
      {"dt", "0.2", "sampling step"},
      {"steps", "40", "number of maps / prediction horizon K"},
      {"n_traj", "100000", "trajectories for the trajectory ground truth"},
      {"seed", "required", "master seed wherever randomness is used"},
      {"k_trunc", "0", "0 selects the smallest K with |T_n| below 1e-3 |T_1 - I| afterwards"},
      {"lambdas", "[]", "per-entry fit regularization; empty selects 0.1 |K(t_1)|"},
      {"biases", "[]", "scaling protocol biases, first is the target; fewer than 2 disables it"},
      {"fit_axes", "z", "diagonal correlation channels fitted in spectroscopy"},
      {"shots", "0", "simulated QPT shots per expectation (0 = exact, none emitted)"},
      {"input", "", "map series JSON or QPT record CSV; empty simulates"},
      {"output", "out", "output directory"},
      {"ground_truth", "trajectory", "trajectory, analytic (sigma^z, one qubit) or hierarchy"},
      {"hierarchy_depth", "12", "truncation depth of the exact hierarchy"},
      {"rho0", "psiX / psiX0", "preparation label used for state outputs"},
      {"project_cptp", "false", "ingest: also write the nearest CPTP maps"},
      {"substeps", "8", "integrator substeps per dt"},
      {"batches", "20", "batches for Monte-Carlo standard errors"},
  };
  return t;
}

struct RunConfig {
  Mode mode = Mode::Simulate;
  SystemSpec system = [] {
    SystemSpec s;
    s.bias = {0.1};
    return s;
  }();
  NoiseSpec noise;
  double dt = 0.2;
  int steps = 40;
  std::int64_t n_traj = 100000;
  std::optional<std::uint64_t> seed;
  int k_trunc = 0;
  std::vector<double> lambdas;
  std::vector<double> biases;
  std::string fit_axes = "z";
  std::int64_t shots = 0;
  std::string input;
  std::string output = "out";
  GroundTruth truth = GroundTruth::Trajectory;
  int hierarchy_depth = 12;
  std::string rho0;
  bool project = false;
  int substeps = 8;
  int batches = 20;

  static constexpr int kMaxSteps = 20000;
  static constexpr long long kMaxSubsteps = 4000000;

  bool simulates() const { return input.empty() && mode != Mode::Ingest; }
  bool stochastic() const {
    return (simulates() && (truth == GroundTruth::Trajectory || mode == Mode::Xy4)) || shots > 0;
  }
  std::string rho0_label() const {
    if (!rho0.empty()) return rho0;
    return system.n_qubits == 2 ? "psiX0" : "psiX";
  }

  nlohmann::json to_json() const {
    nlohmann::json channels = nlohmann::json::array();
    for (const auto& c : noise.channels)
      channels.push_back({{"qubit", c.qubit},
                          {"axis", std::string(1, c.axis)},
                          {"variance", c.variance},
                          {"kappa", c.kappa},
                          {"omega_c", c.omega_c}});
    nlohmann::json noise_j = {{"channels", channels}};
    if (noise.cross_corr.size() != 0) {
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index r = 0; r < noise.cross_corr.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < noise.cross_corr.cols(); ++c) row.push_back(noise.cross_corr(r, c));
        rows.push_back(row);
      }
      noise_j["cross_corr"] = rows;
    }
    nlohmann::json j = {
        {"mode", to_string(mode)},
        {"system", {{"n_qubits", system.n_qubits}, {"bias", system.bias}, {"zz_coupling", system.zz_coupling}}},
        {"noise", noise_j},
        {"dt", dt},
        {"steps", steps},
        {"n_traj", n_traj},
        {"k_trunc", k_trunc},
        {"lambdas", lambdas},
        {"biases", biases},
        {"fit_axes", fit_axes},
        {"shots", shots},
        {"input", input},
        {"output", output},
        {"ground_truth", to_string(truth)},
        {"hierarchy_depth", hierarchy_depth},
        {"rho0", rho0},
        {"project_cptp", project},
        {"substeps", substeps},
        {"batches", batches}};
    j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
    return j;
  }

  /// Parses a configuration document. All field problems are collected and
  /// reported together.
  static RunConfig from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("cli", "configuration must be a JSON object");
    RunConfig c;
    std::vector<std::string> problems;
    auto field = [&](const char* key, auto&& apply) {
      if (!j.contains(key) || j[key].is_null()) return;
      try {
        apply(j[key]);
      } catch (const nlohmann::json::exception& e) {
        problems.push_back(std::string("field '") + key + "': " + e.what());
      } catch (const Error& e) {
        problems.push_back(std::string("field '") + key + "': " +
                           std::string(e.what()).substr(e.module().size() + 2));
      }
    };
    static const std::set<std::string> known = {
        "mode", "system", "noise", "dt", "steps", "n_traj", "seed", "k_trunc", "lambdas", "biases",
        "fit_axes", "shots", "input", "output", "ground_truth", "hierarchy_depth", "rho0",
        "project_cptp", "substeps", "batches"};
    for (const auto& [key, value] : j.items())
      if (!known.count(key)) problems.push_back("unknown field '" + key + "'");

    field("mode", [&](const auto& v) { c.mode = parse_mode(v.template get<std::string>()); });
    field("system", [&](const auto& v) {
      c.system.n_qubits = v.value("n_qubits", 1);
      c.system.bias = v.value("bias", std::vector<double>{0.1});
      c.system.zz_coupling = v.value("zz_coupling", 0.0);
    });
    field("noise", [&](const auto& v) {
      for (const auto& ch : v.value("channels", nlohmann::json::array())) {
        NoiseChannel n;
        n.qubit = ch.value("qubit", 0);
        const auto axis = ch.value("axis", std::string("z"));
        if (axis.size() != 1) throw ValidationError("cli", "channel axis must be one of x, y, z");
        n.axis = axis[0];
        n.variance = ch.at("variance").template get<double>();
        n.kappa = ch.value("kappa", 1.0);
        n.omega_c = ch.value("omega_c", 0.0);
        c.noise.channels.push_back(n);
      }
      if (v.contains("cross_corr")) {
        const auto& rows = v["cross_corr"];
        const auto n = static_cast<Eigen::Index>(rows.size());
        c.noise.cross_corr.resize(n, n);
        for (Eigen::Index r = 0; r < n; ++r) {
          if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != n)
            throw ValidationError("cli", "cross_corr must be square");
          for (Eigen::Index q = 0; q < n; ++q)
            c.noise.cross_corr(r, q) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(q)].template get<double>();
        }
      }
    });
    field("dt", [&](const auto& v) { c.dt = v.template get<double>(); });
    field("steps", [&](const auto& v) { c.steps = v.template get<int>(); });
    field("n_traj", [&](const auto& v) { c.n_traj = v.template get<std::int64_t>(); });
    field("seed", [&](const auto& v) { c.seed = v.template get<std::uint64_t>(); });
    field("k_trunc", [&](const auto& v) { c.k_trunc = v.template get<int>(); });
    field("lambdas", [&](const auto& v) { c.lambdas = v.template get<std::vector<double>>(); });
    field("biases", [&](const auto& v) { c.biases = v.template get<std::vector<double>>(); });
    field("fit_axes", [&](const auto& v) { c.fit_axes = v.template get<std::string>(); });
    field("shots", [&](const auto& v) { c.shots = v.template get<std::int64_t>(); });
    field("input", [&](const auto& v) { c.input = v.template get<std::string>(); });
    field("output", [&](const auto& v) { c.output = v.template get<std::string>(); });
    field("ground_truth", [&](const auto& v) { c.truth = parse_ground_truth(v.template get<std::string>()); });
    field("hierarchy_depth", [&](const auto& v) { c.hierarchy_depth = v.template get<int>(); });
    field("rho0", [&](const auto& v) { c.rho0 = v.template get<std::string>(); });
    field("project_cptp", [&](const auto& v) { c.project = v.template get<bool>(); });
    field("substeps", [&](const auto& v) { c.substeps = v.template get<int>(); });
    field("batches", [&](const auto& v) { c.batches = v.template get<int>(); });
    if (!problems.empty()) {
      std::string msg = "invalid configuration";
      for (const auto& p : problems) msg += "\n  " + p;
      throw ValidationError("cli", msg);
    }
    return c;
  }

  /// Field-level checks; throws with every problem listed.
  void validate() const {
    std::vector<std::string> p;
    auto need = [&](bool ok, const std::string& what) {
      if (!ok) p.push_back(what);
    };
    need(std::isfinite(dt) && dt > 0.0, "field 'dt': must be positive and finite");
    need(steps >= 1 && steps <= kMaxSteps,
         "field 'steps': must lie in [1, " + std::to_string(kMaxSteps) + "]");
    need(substeps >= 1 && static_cast<long long>(substeps) * steps <= kMaxSubsteps,
         "field 'substeps': substeps * steps must lie in [1, " + std::to_string(kMaxSubsteps) + "]");
    need(batches >= 1, "field 'batches': must be >= 1");
    need(n_traj >= 1, "field 'n_traj': must be >= 1");
    need(k_trunc >= 0 && k_trunc <= steps, "field 'k_trunc': must lie in [0, steps]");
    need(shots >= 0, "field 'shots': must be >= 0");
    need(hierarchy_depth >= 0 && hierarchy_depth <= 40, "field 'hierarchy_depth': must lie in [0, 40]");
    need(!output.empty(), "field 'output': must name a directory");
    need(!stochastic() || seed.has_value(), "field 'seed': required for " + to_string(mode) +
                                                 " with trajectory sampling or shots");
    for (double l : lambdas) need(std::isfinite(l) && l >= 0.0, "field 'lambdas': entries must be >= 0");
    for (double b : biases) need(std::isfinite(b) && b != 0.0, "field 'biases': entries must be nonzero");
    for (char a : fit_axes) need(a == 'x' || a == 'y' || a == 'z', "field 'fit_axes': letters x, y, z only");
    if (!rho0.empty()) need(is_known_prep_label(rho0), "field 'rho0': unknown preparation label '" + rho0 + "'");
    switch (mode) {
      case Mode::Ingest: need(!input.empty(), "field 'input': ingest needs a record file"); break;
      case Mode::Nonmarkov:
      case Mode::Spectroscopy:
      case Mode::Xy4:
        need(system.n_qubits == 1, "field 'system.n_qubits': " + to_string(mode) + " is single-qubit");
        break;
      case Mode::Twoqubit:
        need(system.n_qubits == 2, "field 'system.n_qubits': twoqubit needs 2");
        break;
      default: break;
    }
    if (mode == Mode::Xy4) need(substeps % 4 == 0, "field 'substeps': XY4 needs a multiple of 4");
    if (simulates() && truth == GroundTruth::Analytic) {
      const bool ok = system.n_qubits == 1 && noise.size() == 1 && noise.channels[0].axis == 'z';
      need(ok, "field 'ground_truth': analytic maps need one qubit with one sigma^z channel");
    }
    try {
      system.validate(noise);
    } catch (const Error& e) {
      p.push_back(std::string("field 'system'/'noise': ") + e.what());
    }
    if (!p.empty()) {
      std::string msg = "invalid configuration";
      for (const auto& s : p) msg += "\n  " + s;
      throw ValidationError("cli", msg);
    }
  }

  // The output directory does not affect results and stays out of the hash.
  std::string hash() const {
    nlohmann::json j = to_json();
    j.erase("output");
    return hex64(fnv1a64(j.dump()));
  }
};

struct RunOutcome {
  std::vector<std::string> files;
};

namespace detail {

inline Metadata metadata_for(const RunConfig& c, const std::string& origin) {
  Metadata m;
  m.config_hash = c.hash();
  m.seed = c.seed ? std::to_string(*c.seed) : "none";
  m.origin = origin;
  return m;
}

inline nlohmann::json metadata_json(const Metadata& m) {
  return {{"tool", "ttmspec"},
          {"version", kToolVersion},
          {"origin", m.origin},
          {"config_hash", m.config_hash},
          {"seed", m.seed}};
}

class Writer {
 public:
  Writer(std::filesystem::path dir, Metadata meta, RunOutcome& out)
      : dir_(std::move(dir)), meta_(std::move(meta)), out_(out) {}

  void csv(const std::string& name, const Table& t) { put(name, t.to_csv(meta_)); }
  void report(const std::string& name, const Report& r) { put(name, r.to_text(meta_)); }
  void json(const std::string& name, nlohmann::json j) {
    j["metadata"] = metadata_json(meta_);
    put(name, j.dump(1) + "\n");
  }
  void maps(const std::string& name, const MapSeries& s) { json(name, series_to_json(s)); }
  void records(const std::string& name, const std::vector<QptRecord>& r) {
    std::ostringstream o;
    o << meta_.line() << '\n';
    write_records(o, r);
    put(name, o.str());
  }
  const Metadata& meta() const { return meta_; }

 private:
  void put(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    write_text(path, text);
    out_.files.push_back(path.string());
  }

  std::filesystem::path dir_;
  Metadata meta_;
  RunOutcome& out_;
};

inline EnsembleOptions ensemble_options(const RunConfig& c) {
  EnsembleOptions o;
  o.substeps = c.substeps;
  o.batches = c.batches;
  return o;
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// Maps from the input file (series JSON or QPT records) or simulated.
inline MapSeries obtain_maps(const RunConfig& c, int steps) {
  if (!c.input.empty()) {
    if (ends_with(c.input, ".json")) return series_from_json(read_json(c.input));
    const auto records = read_records(c.input);
    const int n = std::any_of(records.begin(), records.end(),
                              [](const QptRecord& r) { return r.pauli.size() == 2; })
                      ? 2
                      : 1;
    return reconstruct_maps(records, PrepBasis::for_qubits(n), c.dt);
  }
  switch (c.truth) {
    case GroundTruth::Analytic: {
      const NoiseSpec& n = c.noise;
      const double omega = c.system.bias.empty() ? 0.0 : c.system.bias[0];
      return analytic_dephasing_series([&n](double t) { return n.correlation(0, 0, t); }, omega, c.dt,
                                       steps);
    }
    case GroundTruth::Hierarchy: {
      HierarchyOptions h;
      h.depth = c.hierarchy_depth;
      return hierarchy_maps(c.system, c.noise, c.dt, steps, h);
    }
    default:
      return ensemble_maps(c.system, c.noise, c.dt, steps, c.n_traj, *c.seed, ensemble_options(c));
  }
}

inline void add_state_columns(std::vector<std::string>& cols, int d) {
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      cols.push_back("re_rho" + std::to_string(i) + std::to_string(j));
      cols.push_back("im_rho" + std::to_string(i) + std::to_string(j));
    }
}

inline void push_state(std::vector<double>& row, const CMatrix& rho) {
  for (Eigen::Index i = 0; i < rho.rows(); ++i)
    for (Eigen::Index j = 0; j < rho.cols(); ++j) {
      row.push_back(rho(i, j).real());
      row.push_back(rho(i, j).imag());
    }
}

inline DensityMatrix prep_state(const RunConfig& c, int n_qubits) {
  const PrepBasis b = PrepBasis::for_qubits(n_qubits);
  return DensityMatrix(b.projector(b.index_of(c.rho0_label())));
}

inline Table diagnostics_table(const MapSeries& maps) {
  Table t({"n", "t", "trace_error", "hermiticity_error", "min_choi_eigenvalue"});
  for (int k = 1; k <= maps.size(); ++k) {
    const MapDiagnostics d = diagnose(maps.at(k));
    t.add({double(k), k * maps.dt, d.trace_error, d.hermiticity_error, d.min_choi_eigenvalue});
  }
  return t;
}

inline Table profile_table(const std::vector<double>& profile, double dt, const std::string& name) {
  Table t({"n", "t", name});
  for (std::size_t i = 0; i < profile.size(); ++i)
    t.add({double(i + 1), double(i + 1) * dt, profile[i]});
  return t;
}

inline int choose_truncation(const RunConfig& c, const TransferTensorSeries& ttms) {
  const int k = c.k_trunc > 0 ? c.k_trunc : default_truncation(ttms);
  check_truncation(ttms, k);
  return k;
}

inline void run_simulate(const RunConfig& c, Writer& w) {
  const MapSeries maps = obtain_maps(c, c.steps);
  w.maps("maps.json", maps);
  w.csv("diagnostics.csv", diagnostics_table(maps));
  const DensityMatrix rho0 = prep_state(c, maps.dim() == 4 ? 2 : 1);
  std::vector<std::string> cols{"n", "t"};
  add_state_columns(cols, rho0.dim());
  Table states(cols);
  std::vector<double> row{0.0, 0.0};
  push_state(row, rho0.matrix());
  states.add(row);
  for (int k = 1; k <= maps.size(); ++k) {
    row = {double(k), k * maps.dt};
    push_state(row, apply(maps.at(k), rho0).matrix());
    states.add(row);
  }
  w.csv("states.csv", states);
  if (c.shots > 0) {
    const PrepBasis basis = PrepBasis::for_qubits(maps.dim() == 4 ? 2 : 1);
    w.records("records.csv", simulate_qpt(maps, basis, c.shots, stream_seed(*c.seed, 0x717074ULL)));
  }
}

inline void run_ttm(const RunConfig& c, Writer& w) {
  const MapSeries maps = obtain_maps(c, c.steps);
  const TransferTensorSeries ttms = build_ttms(maps);
  const auto profile = norm_profile(ttms, true);
  w.csv("norm_profile.csv", profile_table(profile, maps.dt, "norm"));
  const int k = choose_truncation(c, ttms);
  const int horizon = std::max(c.steps, maps.size());
  const DensityMatrix rho0 = prep_state(c, maps.dim() == 4 ? 2 : 1);
  const auto pred = predict_states(ttms, k, rho0, horizon);
  std::vector<std::string> cols{"n", "t"};
  add_state_columns(cols, rho0.dim());
  Table states(cols);
  for (int n = 0; n <= horizon; ++n) {
    std::vector<double> row{double(n), n * maps.dt};
    push_state(row, pred[static_cast<std::size_t>(n)].matrix());
    states.add(row);
  }
  w.csv("prediction.csv", states);
  Table kern({"n", "t", "kernel_norm"});
  // Without a matching system the kernel is reported with L_s = 0.
  const int d2 = maps.dim() * maps.dim();
  const KernelSeries ks = extract_kernel(
      ttms, c.system.dim() == maps.dim() ? c.system.ls() : Superoperator(maps.dim(), CMatrix::Zero(d2, d2)));
  for (int n = 1; n <= ks.size(); ++n) kern.add({double(n), n * maps.dt, frobenius_norm(ks.at(n))});
  w.csv("kernel.csv", kern);
  Report r;
  r.set("maps", maps.size());
  r.set("k_trunc", k);
  r.set("k_trunc_source", std::string(c.k_trunc > 0 ? "config" : "default_truncation"));
  r.set("norm_floor", norm_floor(profile));
  r.set("t1_minus_identity_norm", profile.front());
  w.report("ttm_report.txt", r);
}

inline void run_nonmarkov(const RunConfig& c, Writer& w) {
  const MapSeries maps = obtain_maps(c, c.steps);
  const TransferTensorSeries ttms = build_ttms(maps);
  const int k = choose_truncation(c, ttms);
  const int horizon = std::max(c.steps, maps.size());
  const VolumeSeries direct = volume_series(maps);
  const auto [extended, nv_ext] = extended_volume_measure(ttms, k, horizon);
  const auto cum = cumulative_measure(extended);
  Table t({"n", "t", "volume_direct", "volume_extended", "cumulative_nv_extended"});
  for (int n = 0; n <= horizon; ++n) {
    const double vd = n < static_cast<int>(direct.values.size()) ? direct.values[static_cast<std::size_t>(n)]
                                                                  : std::nan("");
    t.add({double(n), n * maps.dt, vd, extended.values[static_cast<std::size_t>(n)],
           cum[static_cast<std::size_t>(n)]});
  }
  w.csv("volume.csv", t);
  Report r;
  r.set("k_trunc", k);
  r.set("nv_direct", volume_measure(direct));
  r.set("nv_extended", nv_ext);
  r.set("violations_direct", static_cast<int>(direct.violations().size()));
  r.set("violations_extended", static_cast<int>(extended.violations().size()));
  w.report("nonmarkov_report.txt", r);
}

inline void run_spectroscopy(const RunConfig& c, Writer& w) {
  const ChannelMask mask = ChannelMask::diagonal(c.fit_axes);
  std::vector<KernelSeries> kernels;
  const MapSeries maps = obtain_maps(c, c.steps);
  kernels.push_back(extract_kernel(build_ttms(maps), c.system.ls()));
  const bool scaling = c.biases.size() >= 2;
  ScaledKernel sk;
  if (scaling) {
    if (!c.input.empty()) throw ValidationError("cli", "field 'biases': the scaling protocol simulates, leave 'input' empty");
    if (c.system.bias.empty() || c.biases.front() != c.system.bias.front())
      throw ValidationError("cli", "field 'biases': first entry must equal system.bias[0]");
    for (std::size_t i = 1; i < c.biases.size(); ++i) {
      RunConfig ci = c;
      const double ratio = c.biases[i] / c.biases.front();
      ci.system.bias = {c.biases[i]};
      ci.dt = c.dt / ratio;
      for (auto& ch : ci.noise.channels) {
        ch.kappa *= ratio;
        ch.omega_c *= ratio;
      }
      if (ci.seed) ci.seed = stream_seed(*c.seed, i);
      kernels.push_back(extract_kernel(build_ttms(obtain_maps(ci, c.steps)), ci.system.ls()));
    }
    sk = combine_scaled_kernels(kernels, c.biases);
  }
  const KernelSeries& target = scaling ? sk.kernel : kernels.front();
  const CorrelationFit fit = fit_correlations(target, c.system, mask, c.lambdas);

  std::vector<std::string> cols{"t"};
  std::vector<char> axes(c.fit_axes.begin(), c.fit_axes.end());
  for (char a : axes) {
    cols.push_back(std::string("fit_C") + a + a);
    cols.push_back(std::string("exact_C") + a + a);
  }
  Table corr(cols);
  auto exact = [&](char a, double t) {
    double v = 0.0;
    for (int i = 0; i < c.noise.size(); ++i)
      if (c.noise.channels[static_cast<std::size_t>(i)].axis == a) v += c.noise.correlation(i, i, t);
    return c.input.empty() ? v : std::nan("");
  };
  for (int j = 0; j < fit.corr.size(); ++j) {
    std::vector<double> row{j * fit.corr.dt};
    for (char a : axes) {
      const auto ai = static_cast<Eigen::Index>(ChannelMask::axis_index(a));
      row.push_back(fit.corr.values[static_cast<std::size_t>(j)](ai, ai).real());
      row.push_back(exact(a, j * fit.corr.dt));
    }
    corr.add(row);
  }
  w.csv("correlation.csv", corr);

  std::vector<std::string> scols{"omega"};
  std::vector<SpectralDensity> spectra;
  for (char a : axes) {
    scols.push_back(std::string("S") + a + a);
    spectra.push_back(spectral_density(fit.corr, a, a, SpectrumKind::Classical));
  }
  Table spec(scols);
  for (std::size_t k = 0; k < spectra.front().omega.size(); ++k) {
    std::vector<double> row{spectra.front().omega[k]};
    for (const auto& s : spectra) row.push_back(s.values[k]);
    spec.add(row);
  }
  w.csv("spectrum.csv", spec);

  Report r;
  r.set("entries", fit.corr.size());
  r.set("default_lambda", fit.default_lambda);
  double worst = 0.0;
  for (double x : fit.residual) worst = std::max(worst, x);
  r.set("max_residual", worst);
  r.set("scaling_protocol", scaling);
  if (scaling) {
    r.set("scaling_condition", sk.condition);
    r.set("scaling_interpolation_error", sk.interpolation_error);
  }
  for (char a : axes) {
    const auto s = spectral_density(fit.corr, a, a, SpectrumKind::Classical);
    r.set(std::string("spectrum_decayed_") + a + a, s.decayed);
    r.set(std::string("parseval_") + a + a, parseval_sum(s));
  }
  w.report("fit_report.txt", r);
}

inline void run_twoqubit(const RunConfig& c, Writer& w) {
  const MapSeries maps = obtain_maps(c, c.steps);
  if (maps.dim() != 4) throw DimensionError("cli", "twoqubit needs two-qubit maps");
  const UnraveledSeries u = unravel(maps);
  const Isolation iso = isolate_from_series(maps, c.input.empty() ? &c.noise : nullptr);
  const CollectiveReport rep = collective_report(u, iso);
  Table t({"n", "t", "full", "separable", "correlated"});
  for (std::size_t i = 0; i < rep.full_profile.size(); ++i)
    t.add({double(i + 1), double(i + 1) * maps.dt, rep.full_profile[i], rep.separable_profile[i],
           rep.correlated_profile[i]});
  w.csv("norms.csv", t);
  Table diag({"index", "re_dl_dt", "im_dl_dt", "re_dk_dt2_reindexed", "im_dk_dt2_reindexed"});
  const CMatrix dk = reindex_bipartite(iso.dk_dt2.matrix());
  for (int i = 0; i < 16; ++i)
    diag.add({double(i + 1), iso.dl_dt.matrix()(i, i).real(), iso.dl_dt.matrix()(i, i).imag(),
              dk(i, i).real(), dk(i, i).imag()});
  w.csv("isolation_diagonal.csv", diag);
  Report r;
  r.set("dl_dt_norm", rep.dl_norm);
  r.set("dk_dt2_norm", rep.dk_norm);
  r.set("ratio", rep.ratio);
  r.set("threshold", rep.threshold);
  r.set("verdict", rep.verdict);
  r.set("short_step", iso.short_step);
  r.set("note", rep.note);
  w.report("collective_report.txt", r);

  const int k = choose_truncation(c, u.full);
  const DensityMatrix rho0 = prep_state(c, 2);
  const int horizon = std::max(c.steps, maps.size());
  const auto full = predict_states(u.full, k, rho0, horizon);
  const auto sep = predict_states(u.separable, k, rho0, horizon);
  std::vector<std::string> cols{"n", "t"};
  for (const char* tag : {"full_", "separable_"}) {
    std::vector<std::string> s;
    add_state_columns(s, 4);
    for (auto& x : s) cols.push_back(tag + x);
  }
  Table pred(cols);
  for (int n = 0; n <= horizon; ++n) {
    std::vector<double> row{double(n), n * maps.dt};
    push_state(row, full[static_cast<std::size_t>(n)].matrix());
    push_state(row, sep[static_cast<std::size_t>(n)].matrix());
    pred.add(row);
  }
  w.csv("prediction.csv", pred);
}

inline void run_xy4(const RunConfig& c, Writer& w) {
  const EnsembleOptions o = ensemble_options(c);
  const auto free_p = norm_profile(build_ttms(ensemble_maps(c.system, c.noise, c.dt, c.steps, c.n_traj, *c.seed, o)), true);
  const auto xy4_p = norm_profile(build_ttms(evolve_with_xy4(c.system, c.noise, c.dt, c.steps, c.n_traj, *c.seed, o)), true);
  const double thr = 0.01 * free_p.front();
  Table t({"n", "t", "free", "xy4"});
  int nf = 0, nx = 0;
  for (std::size_t i = 0; i < free_p.size(); ++i) {
    t.add({double(i + 1), double(i + 1) * c.dt, free_p[i], xy4_p[i]});
    nf += free_p[i] > thr;
    nx += xy4_p[i] > thr;
  }
  w.csv("norms.csv", t);
  Report r;
  r.set("threshold", thr);
  r.set("free_above_threshold", nf);
  r.set("xy4_above_threshold", nx);
  w.report("xy4_report.txt", r);
}

inline void run_ingest(const RunConfig& c, Writer& w) {
  const MapSeries maps = obtain_maps(c, c.steps);
  w.maps("maps.json", maps);
  w.csv("diagnostics.csv", diagnostics_table(maps));
  w.csv("norm_profile.csv", profile_table(norm_profile(build_ttms(maps), true), maps.dt, "norm"));
  if (c.project) {
    MapSeries projected = maps;
    Table t({"n", "iterations", "residual", "converged"});
    for (int k = 1; k <= maps.size(); ++k) {
      const CptpProjection p = project_cptp(maps.at(k));
      projected.maps[static_cast<std::size_t>(k - 1)] = p.map;
      t.add({double(k), double(p.iterations), p.residual, p.converged ? 1.0 : 0.0});
    }
    w.maps("maps_cptp.json", projected);
    w.csv("projection.csv", t);
  }
}

}  // namespace detail

/// Runs one configured pipeline, writing its artifacts under config.output.
inline RunOutcome run(const RunConfig& c) {
  c.validate();
  RunOutcome out;
  detail::Writer w(c.output, detail::metadata_for(c, to_string(c.mode)), out);
  nlohmann::json cfg = c.to_json();
  w.json("config.json", {{"config", cfg}});
  switch (c.mode) {
    case Mode::Simulate: detail::run_simulate(c, w); break;
    case Mode::Ttm: detail::run_ttm(c, w); break;
    case Mode::Nonmarkov: detail::run_nonmarkov(c, w); break;
    case Mode::Spectroscopy: detail::run_spectroscopy(c, w); break;
    case Mode::Twoqubit: detail::run_twoqubit(c, w); break;
    case Mode::Xy4: detail::run_xy4(c, w); break;
    case Mode::Ingest: detail::run_ingest(c, w); break;
  }
  return out;
}

// --- Presets ---------------------------------------------------------------------

struct PresetOptions {
  std::string output = "out";
  std::optional<std::int64_t> n_traj;
  std::uint64_t seed = scenarios::kDefaultSeed;
  int hierarchy_depth = 12;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig1", "fig2", "fig3top", "fig3bottom",
                                                 "fig4", "fig5", "fig6", "xy4"};
  return names;
}

namespace detail {

inline Metadata preset_metadata(const std::string& name, const nlohmann::json& params, std::uint64_t seed) {
  Metadata m;
  m.origin = "preset:" + name;
  m.config_hash = hex64(fnv1a64(params.dump()));
  m.seed = std::to_string(seed);
  return m;
}

inline void write_fit(Writer& w, const scenarios::FitComparison& f, char axis) {
  const std::string ch = std::string("C") + axis + axis;
  Table t({"t", "fit_" + ch, "exact_" + ch});
  for (std::size_t j = 0; j < f.fitted.size(); ++j) t.add({f.times[j], f.fitted[j], f.exact[j]});
  w.csv("correlation.csv", t);
  const double dt = f.times.size() > 1 ? f.times[1] : 1.0;
  std::vector<cplx> fit(f.fitted.begin(), f.fitted.end()), ex(f.exact.begin(), f.exact.end());
  const auto sf = spectral_density(fit, dt, SpectrumKind::Classical);
  const auto se = spectral_density(ex, dt, SpectrumKind::Classical);
  Table s({"omega", "S_fit", "S_exact"});
  for (std::size_t k = 0; k < sf.omega.size(); ++k) s.add({sf.omega[k], sf.values[k], se.values[k]});
  w.csv("spectrum.csv", s);
  Report r;
  r.set("max_relative_error_first_20", f.max_relative_error(20));
  r.set("default_lambda", f.fit.default_lambda);
  w.report("fit_report.txt", r);
}

inline void write_fig6(Writer& w, const scenarios::Fig6Result& f, double dt, const std::string& name) {
  std::vector<std::string> cols{"n", "t", "re_oracle", "im_oracle", "oracle_se"};
  for (int k : f.map_counts)
    for (const char* tag : {"full", "separable"}) {
      cols.push_back(std::string("re_") + tag + "_" + std::to_string(k));
      cols.push_back(std::string("im_") + tag + "_" + std::to_string(k));
    }
  Table t(cols);
  for (std::size_t n = 0; n < f.oracle.size(); ++n) {
    std::vector<double> row{double(n), double(n) * dt, f.oracle[n].real(), f.oracle[n].imag(), f.oracle_error[n]};
    for (std::size_t i = 0; i < f.map_counts.size(); ++i) {
      row.push_back(f.full[i][n].real());
      row.push_back(f.full[i][n].imag());
      row.push_back(f.separable[i][n].real());
      row.push_back(f.separable[i][n].imag());
    }
    t.add(row);
  }
  w.csv(name, t);
}

}  // namespace detail

/// Trajectory counts used by the presets unless overridden.
inline std::int64_t preset_default_traj(const std::string& name, int model = 1) {
  if (name == "fig1" || name == "fig2") return 100000;
  if (name == "fig6") return model == 1 ? 400000 : 20000;
  return 20000;
}

/// Writes the series behind one figure.
inline RunOutcome run_preset(const std::string& name, const PresetOptions& opt) {
  namespace sc = scenarios;
  if (std::find(preset_names().begin(), preset_names().end(), name) == preset_names().end())
    throw ValidationError("cli", "unknown preset '" + name + "'");
  auto traj = [&](int model = 1) { return opt.n_traj.value_or(preset_default_traj(name, model)); };
  HierarchyOptions h;
  h.depth = opt.hierarchy_depth;
  nlohmann::json params = {{"preset", name}, {"seed", opt.seed}, {"hierarchy_depth", h.depth}};
  RunOutcome out;

  if (name == "fig1" || name == "fig2") {
    const sc::DephasingModel m;
    params["n_traj"] = traj();
    params["model"] = {{"omega_s", m.omega_s}, {"lambda", m.lambda}, {"kappa", m.kappa},
                       {"omega_c", m.omega_c}, {"dt", m.dt}, {"steps", m.steps}};
    detail::Writer w(opt.output, detail::preset_metadata(name, params, opt.seed), out);
    w.json("preset.json", params);
    const MapSeries maps = m.simulate(traj(), opt.seed);
    if (name == "fig1") {
      const auto r = sc::fig1(m, maps);
      Table prof({"n", "t", "norm", "threshold"});
      for (std::size_t i = 0; i < r.profile.size(); ++i)
        prof.add({double(i + 1), double(i + 1) * m.dt, r.profile[i], 0.01 * r.profile.front()});
      w.csv("norm_profile.csv", prof);
      std::vector<std::string> cols{"n", "t", "oracle"};
      for (int k : r.k_truncs) cols.push_back("ktrunc_" + std::to_string(k));
      Table coh(cols);
      for (int n = 0; n <= m.steps; ++n) {
        std::vector<double> row{double(n), n * m.dt, r.oracle[static_cast<std::size_t>(n)]};
        for (const auto& p : r.predicted) row.push_back(p[static_cast<std::size_t>(n)]);
        coh.add(row);
      }
      w.csv("coherence.csv", coh);
    } else {
      const auto r = sc::fig2(m, maps);
      Table t({"n", "t", "exact", "direct", "extended", "extended_se"});
      for (int n = 0; n <= m.steps; ++n) {
        const auto i = static_cast<std::size_t>(n);
        t.add({double(n), n * m.dt, r.exact[i], r.direct[i], r.extended[i], r.std_error[i]});
      }
      w.csv("volume.csv", t);
      Report rep;
      rep.set("k_trunc", r.k_trunc);
      rep.set("nv_extended", r.nv_extended);
      rep.set("nv_exact", r.nv_exact);
      w.report("nonmarkov_report.txt", rep);
    }
    return out;
  }

  if (name == "fig3top" || name == "fig4") {
    sc::SpectroscopyModel m;
    if (name == "fig4") m.axis = 'x';
    params["model"] = {{"omega_s", m.omega_s}, {"lambda", m.lambda}, {"kappa", m.kappa},
                       {"dt", m.dt}, {"steps", m.steps}, {"axis", std::string(1, m.axis)}};
    detail::Writer w(opt.output, detail::preset_metadata(name, params, opt.seed), out);
    w.json("preset.json", params);
    detail::write_fit(w, name == "fig4" ? sc::fig4(m, h) : sc::fig3top(m), m.axis);
    return out;
  }

  if (name == "fig3bottom") {
    const sc::SpectroscopyModel m;
    const auto lambdas = sc::fig3bottom_lambdas();
    params["lambdas"] = lambdas;
    params["biases"] = {0.02, 0.10};
    detail::Writer w(opt.output, detail::preset_metadata(name, params, opt.seed), out);
    w.json("preset.json", params);
    Table t({"lambda", "exact", "naive", "scaled", "condition", "interpolation_error"});
    for (const auto& r : sc::fig3bottom(m, lambdas))
      t.add({r.lambda, r.exact, r.naive, r.scaled, r.condition, r.interpolation_error});
    w.csv("scaling.csv", t);
    return out;
  }

  if (name == "fig5") {
    params["n_traj"] = traj();
    params["steps"] = 16;
    detail::Writer w(opt.output, detail::preset_metadata(name, params, opt.seed), out);
    w.json("preset.json", params);
    for (int which : {1, 2}) {
      sc::TwoQubitModel m;
      m.which = which;
      const auto r = sc::fig5(m, 16, traj(), stream_seed(opt.seed, static_cast<std::uint64_t>(which)), h);
      const std::string tag = "_model" + std::to_string(which);
      Table t({"n", "t", "full", "separable", "correlated"});
      for (std::size_t i = 0; i < r.full.size(); ++i)
        t.add({double(i + 1), double(i + 1) * m.dt, r.full[i], r.separable[i], r.correlated[i]});
      w.csv("norms" + tag + ".csv", t);
      Table d({"index", "re_dl_dt", "im_dl_dt", "re_dk_dt2_reindexed", "im_dk_dt2_reindexed"});
      for (int i = 0; i < 16; ++i)
        d.add({double(i + 1), r.isolation.dl_dt.matrix()(i, i).real(), r.isolation.dl_dt.matrix()(i, i).imag(),
               r.dk_reindexed(i, i).real(), r.dk_reindexed(i, i).imag()});
      w.csv("isolation" + tag + ".csv", d);
      Report rep;
      rep.set("verdict", r.report.verdict);
      rep.set("dl_dt_norm", r.report.dl_norm);
      rep.set("dk_dt2_norm", r.report.dk_norm);
      rep.set("note", r.report.note);
      w.report("collective" + tag + ".txt", rep);
    }
    return out;
  }

  if (name == "fig6") {
    params["n_traj"] = {traj(1), traj(2)};
    params["steps"] = 40;
    params["map_counts"] = {1, 8, 16};
    detail::Writer w(opt.output, detail::preset_metadata(name, params, opt.seed), out);
    w.json("preset.json", params);
    for (int which : {1, 2}) {
      sc::TwoQubitModel m;
      m.which = which;
      const auto r = sc::fig6(m, 40, {1, 8, 16}, traj(which), stream_seed(opt.seed, static_cast<std::uint64_t>(which)));
      detail::write_fig6(w, r, m.dt, "coherence_model" + std::to_string(which) + ".csv");
    }
    return out;
  }

  // xy4
  const sc::Xy4Model m;
  params["n_traj"] = traj();
  params["model"] = {{"omega_s", m.omega_s}, {"lambda", m.lambda}, {"kappa", m.kappa},
                     {"dt_cycle", m.dt_cycle}, {"cycles", m.cycles}};
  detail::Writer w(opt.output, detail::preset_metadata(name, params, opt.seed), out);
  w.json("preset.json", params);
  const auto r = sc::xy4(m, traj(), opt.seed);
  Table t({"n", "t", "free", "xy4", "threshold"});
  for (std::size_t i = 0; i < r.free_profile.size(); ++i)
    t.add({double(i + 1), double(i + 1) * m.dt_cycle, r.free_profile[i], r.xy4_profile[i], r.threshold});
  w.csv("norms.csv", t);
  Report rep;
  rep.set("free_above_threshold", r.free_count);
  rep.set("xy4_above_threshold", r.xy4_count);
  w.report("xy4_report.txt", rep);
  return out;
}

}  // namespace ttmspec
