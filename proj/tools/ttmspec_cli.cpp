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

// Command-line front end: one subcommand per pipeline mode plus presets.

#include "ttmspec/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

/// Flags shared by every pipeline subcommand. Unset flags leave the config
/// file (or the defaults) untouched.
struct Flags {
  std::string config;
  std::optional<std::string> output, input, ground_truth, fit_axes, rho0;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt, zz;
  std::optional<int> steps, k_trunc, depth, substeps, batches, qubits;
  std::optional<std::int64_t> n_traj, shots;
  std::vector<double> lambdas, biases, bias, cross_corr;
  std::vector<std::string> channels;
  bool project = false;
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("-c,--config", f.config, "JSON configuration file")->check(CLI::ExistingFile);
  app->add_option("-o,--out", f.output, "output directory");
  app->add_option("-i,--input", f.input, "map series (.json) or QPT records (.csv)");
  app->add_option("--seed", f.seed, "master seed (required when sampling)");
  app->add_option("--dt", f.dt, "sampling step");
  app->add_option("--steps", f.steps, "number of maps / horizon K");
  app->add_option("--n-traj", f.n_traj, "trajectories");
  app->add_option("--k-trunc", f.k_trunc, "TTM truncation (0 = automatic)");
  app->add_option("--lambdas", f.lambdas, "fit regularization per kernel entry");
  app->add_option("--biases", f.biases, "scaling-protocol biases, target first");
  app->add_option("--fit-axes", f.fit_axes, "correlation channels to fit, e.g. z or xz");
  app->add_option("--shots", f.shots, "simulated QPT shots (simulate)");
  app->add_option("--ground-truth", f.ground_truth, "trajectory, analytic or hierarchy");
  app->add_option("--depth", f.depth, "hierarchy depth");
  app->add_option("--rho0", f.rho0, "preparation label for state outputs");
  app->add_option("--substeps", f.substeps, "integrator substeps per dt");
  app->add_option("--batches", f.batches, "batches for standard errors");
  app->add_option("--qubits", f.qubits, "number of qubits (1 or 2)");
  app->add_option("--bias", f.bias, "sigma^z bias per qubit");
  app->add_option("--zz", f.zz, "sigma^z sigma^z coupling");
  app->add_option("--channel", f.channels,
                  "noise channel axis:qubit:variance[:kappa[:omega_c]], repeatable");
  app->add_option("--cross-corr", f.cross_corr, "equal-time covariance, row-major");
  app->add_flag("--project-cptp", f.project, "ingest: also write nearest CPTP maps");
}

json parse_channel(const std::string& spec) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = spec.find(':', start);
    parts.push_back(spec.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (parts.size() < 3 || parts.size() > 5)
    throw ttmspec::ValidationError("cli", "--channel '" + spec + "': expected axis:qubit:variance[:kappa[:omega_c]]");
  try {
    json c = {{"axis", parts[0]}, {"qubit", std::stoi(parts[1])}, {"variance", std::stod(parts[2])}};
    if (parts.size() > 3) c["kappa"] = std::stod(parts[3]);
    if (parts.size() > 4) c["omega_c"] = std::stod(parts[4]);
    return c;
  } catch (const std::exception&) {
    throw ttmspec::ValidationError("cli", "--channel '" + spec + "': bad number");
  }
}

json build_config(const std::string& mode, const Flags& f) {
  json j = f.config.empty() ? json::object() : ttmspec::read_json(f.config);
  if (!j.is_object()) throw ttmspec::ValidationError("cli", f.config + ": expected a JSON object");
  j["mode"] = mode;
  auto set = [&](const char* key, const auto& opt) {
    if (opt) j[key] = *opt;
  };
  set("output", f.output);
  set("input", f.input);
  set("ground_truth", f.ground_truth);
  set("fit_axes", f.fit_axes);
  set("rho0", f.rho0);
  set("seed", f.seed);
  set("dt", f.dt);
  set("steps", f.steps);
  set("k_trunc", f.k_trunc);
  set("hierarchy_depth", f.depth);
  set("substeps", f.substeps);
  set("batches", f.batches);
  set("n_traj", f.n_traj);
  set("shots", f.shots);
  if (!f.lambdas.empty()) j["lambdas"] = f.lambdas;
  if (!f.biases.empty()) j["biases"] = f.biases;
  if (f.project) j["project_cptp"] = true;
  if (f.qubits || !f.bias.empty() || f.zz) {
    json s = j.value("system", json::object());
    if (f.qubits) s["n_qubits"] = *f.qubits;
    if (!f.bias.empty()) s["bias"] = f.bias;
    if (f.zz) s["zz_coupling"] = *f.zz;
    j["system"] = s;
  }
  if (!f.channels.empty() || !f.cross_corr.empty()) {
    json n = j.value("noise", json::object());
    if (!f.channels.empty()) {
      n["channels"] = json::array();
      for (const auto& c : f.channels) n["channels"].push_back(parse_channel(c));
    }
    if (!f.cross_corr.empty()) {
      const auto m = static_cast<std::size_t>(std::lround(std::sqrt(double(f.cross_corr.size()))));
      if (m * m != f.cross_corr.size())
        throw ttmspec::ValidationError("cli", "--cross-corr needs a square number of entries");
      json rows = json::array();
      for (std::size_t r = 0; r < m; ++r)
        rows.push_back(std::vector<double>(f.cross_corr.begin() + static_cast<long>(r * m),
                                           f.cross_corr.begin() + static_cast<long>((r + 1) * m)));
      n["cross_corr"] = rows;
    }
    j["noise"] = n;
  }
  return j;
}

void list(const ttmspec::RunOutcome& out) {
  for (const auto& f : out.files) std::cout << f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ttmspec: transfer-tensor analysis and noise spectroscopy"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ttmspec::kToolVersion));

  std::vector<std::pair<CLI::App*, std::unique_ptr<Flags>>> modes;
  for (const auto& [mode, name] : ttmspec::mode_names()) {
    auto flags = std::make_unique<Flags>();
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " pipeline");
    add_flags(sub, *flags);
    modes.emplace_back(sub, std::move(flags));
  }

  std::string preset_name;
  ttmspec::PresetOptions popt;
  std::optional<std::int64_t> preset_traj;
  CLI::App* preset = app.add_subcommand("preset", "write the series behind one figure");
  preset->add_option("name", preset_name, "fig1 fig2 fig3top fig3bottom fig4 fig5 fig6 xy4")
      ->required()
      ->check(CLI::IsMember(ttmspec::preset_names()));
  preset->add_option("-o,--out", popt.output, "output directory");
  preset->add_option("--seed", popt.seed, "master seed");
  preset->add_option("--n-traj", preset_traj, "override the trajectory count");
  preset->add_option("--depth", popt.hierarchy_depth, "hierarchy depth");

  CLI::App* defaults = app.add_subcommand("defaults", "print the configuration defaults");

  CLI11_PARSE(app, argc, argv);

  try {
    if (defaults->parsed()) {
      for (const auto& d : ttmspec::default_table())
        std::printf("%-24s %-14s %s\n", d.field, d.value, d.meaning);
      return 0;
    }
    if (preset->parsed()) {
      popt.n_traj = preset_traj;
      list(ttmspec::run_preset(preset_name, popt));
      return 0;
    }
    for (const auto& [sub, flags] : modes) {
      if (!sub->parsed()) continue;
      const auto cfg = ttmspec::RunConfig::from_json(build_config(sub->get_name(), *flags));
      list(ttmspec::run(cfg));
      return 0;
    }
  } catch (const ttmspec::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ttmspec::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
