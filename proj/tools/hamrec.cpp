// Copyright 2026 The hamrec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// hamrec: generate sparse Hamiltonians, run single trials, sweeps and heat
// maps, and summarize threshold crossings. Errors go to stderr as one JSON
// line {"error": kind, "message": text}; usage errors exit 2.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hamrec/hamrec.hpp"

namespace {

using hamrec::DomainError;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int report_error(const std::string& kind, const std::string& message, int code) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << std::endl;
  return code;
}

// Flag values as given; anything left unset falls back to a config file, then defaults.
struct Flags {
  std::string config;
  std::optional<int> n;
  std::vector<std::size_t> s;
  std::optional<std::string> policy;
  std::optional<double> eta_beta;
  std::vector<std::size_t> m;
  std::optional<std::size_t> m_min, m_max, m_step;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  std::optional<std::size_t> circuit_length;
  std::string out;
  std::string format = "csv";
  unsigned jobs = 1;
  std::optional<double> noise_sigma;
  std::optional<std::size_t> grid;
  std::string svg;
  bool fixed_hamiltonian = false;
  std::string in;
  std::string protocol = "cs";
  std::string hamiltonian;
};

void add_model_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--n", f.n, "number of qubits");
  cmd->add_option("--s", f.s, "sparsity (comma-separated list allowed)")->delimiter(',');
  cmd->add_option("--policy", f.policy, "support policy")->check(CLI::IsMember({"random", "two-local"}));
  cmd->add_option("--beta-eta", f.eta_beta, "dimensionless temperature knob eta*beta");
  cmd->add_option("--seed", f.seed, "master seed");
}

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON experiment config (flags override it)");
  add_model_flags(cmd, f);
  cmd->add_option("--trials", f.trials, "trials per point");
  cmd->add_option("--threshold", f.threshold, "success threshold on the normalized error");
  cmd->add_option("--circuit-length", f.circuit_length, "gates per random circuit (default n^8)");
  cmd->add_option("--out", f.out, "output path (default stdout)");
  cmd->add_option("--format", f.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--jobs", f.jobs, "worker threads (0 = all cores); never changes results");
  cmd->add_option("--noise-sigma", f.noise_sigma, "experimental: Gaussian noise on each measurement");
  cmd->add_option("--svg", f.svg, "also write a minimal SVG rendering here");
  cmd->add_flag("--fixed-hamiltonian", f.fixed_hamiltonian, "diagnostics: one H per sparsity, fresh circuits");
}

void add_m_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--m", f.m, "explicit M list (comma-separated)")->delimiter(',');
  cmd->add_option("--m-min", f.m_min, "first M of a range");
  cmd->add_option("--m-max", f.m_max, "last M of a range");
  cmd->add_option("--m-step", f.m_step, "M range step");
}

hamrec::ExperimentConfig build_config(const Flags& f) {
  hamrec::ExperimentConfig c;
  if (!f.config.empty()) {
    std::ifstream is(f.config);
    if (!is) throw UsageError("cannot open config " + f.config);
    nlohmann::json j;
    try {
      is >> j;
    } catch (const nlohmann::json::exception& e) {
      throw DomainError(std::string("config is not valid JSON: ") + e.what());
    }
    c = hamrec::experiment_config_from_json(j);
  }
  if (f.n) c.n = *f.n;
  if (!f.s.empty()) c.s = f.s;
  if (f.policy) c.policy = hamrec::parse_support_policy(*f.policy);
  if (f.eta_beta) c.eta_beta = *f.eta_beta;
  const bool range = f.m_min || f.m_max || f.m_step;
  if (!f.m.empty() && range) throw UsageError("--m cannot be combined with --m-min/--m-max/--m-step");
  if (!f.m.empty()) {
    c.m_list = f.m;
    c.m_range.reset();
  }
  if (range) {
    if (!f.m_min || !f.m_max) throw UsageError("an M range needs both --m-min and --m-max");
    c.m_range = hamrec::MRange{*f.m_min, *f.m_max, f.m_step.value_or(1)};
    c.m_list.reset();
  }
  if (f.trials) c.trials = *f.trials;
  if (f.seed) c.seed = *f.seed;
  if (f.threshold) c.threshold = *f.threshold;
  if (f.circuit_length) c.circuit_length = *f.circuit_length;
  if (f.noise_sigma) c.noise_sigma = *f.noise_sigma;
  if (f.grid) c.grid = *f.grid;
  if (f.fixed_hamiltonian) c.fixed_hamiltonian = true;
  if (!f.out.empty()) c.out_csv = f.out;
  if (!f.svg.empty()) c.out_svg = f.svg;
  c.validate();
  return c;
}

/// Writes to `path`, or stdout when empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

/// The exact config beside a file output, so the run can be repeated with --config.
void stamp_config(const hamrec::ExperimentConfig& c, const std::string& out) {
  if (out.empty()) return;
  emit(out + ".config.json", hamrec::to_json(c).dump(2) + "\n");
}

nlohmann::json curve_json(const hamrec::SweepCurve& c) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : c.points) {
    pts.push_back({{"M", p.m},
                   {"median_err", p.median_err},
                   {"q1_err", p.q1_err},
                   {"q3_err", p.q3_err},
                   {"success_rate", p.success_rate},
                   {"unconverged", p.unconverged},
                   {"errors", p.errors}});
  }
  return {{"protocol", hamrec::to_string(c.protocol)}, {"n", c.n},         {"s", c.s},
          {"policy", hamrec::to_string(c.policy)},     {"eta_beta", c.eta_beta}, {"trials", c.trials},
          {"threshold", c.threshold},                  {"seed", c.seed},   {"points", pts}};
}

int cmd_gen(const Flags& f) {
  if (!f.n || f.s.size() != 1) throw UsageError("gen needs --n and a single --s");
  const auto policy = hamrec::parse_support_policy(f.policy.value_or("random"));
  std::mt19937_64 rng(f.seed.value_or(0));
  const auto h = hamrec::random_hamiltonian(*f.n, f.s[0], policy, rng);
  emit(f.out, hamrec::to_json(h).dump() + "\n");
  return 0;
}

int cmd_trial(const Flags& f) {
  if (f.m.size() != 1 || f.m_min || f.m_max || f.m_step) throw UsageError("trial needs exactly one --m");
  const auto protocol = hamrec::parse_protocol(f.protocol);
  Flags g = f;
  if (g.s.empty() && f.hamiltonian.empty()) throw UsageError("trial needs --s or --hamiltonian");
  if (g.s.empty()) g.s = {1};
  hamrec::ExperimentConfig c = build_config(g);
  if (c.s.size() != 1) throw UsageError("trial takes a single --s");
  const std::size_t m = f.m[0];
  hamrec::TrialResult r;
  if (f.hamiltonian.empty()) {
    // Same seed as trial 0 of the matching sweep point.
    const auto stream = protocol == hamrec::Protocol::CS ? hamrec::SeedStream::CS : hamrec::SeedStream::NoCS;
    r = hamrec::run_seeded_trial(c, protocol, c.s[0], m, hamrec::mix_seed(c.seed, stream, hamrec::grid_point(c.s[0], m), 0));
  } else {
    std::ifstream is(f.hamiltonian);
    if (!is) throw UsageError("cannot open " + f.hamiltonian);
    nlohmann::json j;
    is >> j;
    const auto h = hamrec::hamiltonian_from_json(j);
    if (f.n && *f.n != h.n) throw UsageError("--n disagrees with the Hamiltonian file");
    std::mt19937_64 rng(c.seed);
    auto opts = c.trial_options();
    r = protocol == hamrec::Protocol::CS ? hamrec::run_cs_trial(h, c.eta_beta, m, rng, opts)
                                         : hamrec::run_no_cs_trial(h, c.eta_beta, m, rng, opts);
    r.seeds.master = c.seed;
    r.seeds.trial = c.seed;
  }
  emit(f.out, hamrec::to_json(r).dump() + "\n");
  return 0;
}

int cmd_sweep(const Flags& f) {
  const auto c = build_config(f);
  const auto curves = hamrec::run_sweeps(c, f.jobs);
  std::ostringstream os;
  if (f.format == "json") {
    nlohmann::json j = {{"config", hamrec::to_json(c)}, {"curves", nlohmann::json::array()}};
    for (const auto& cv : curves) j["curves"].push_back(curve_json(cv));
    os << j.dump(2) << '\n';
  } else {
    hamrec::write_sweep_csv(os, curves);
  }
  emit(f.out, os.str());
  stamp_config(c, f.out);
  if (!f.svg.empty()) {
    std::ostringstream svg;
    hamrec::write_sweep_svg(svg, curves, c.threshold);
    emit(f.svg, svg.str());
  }
  return 0;
}

int cmd_heatmap(const Flags& f) {
  if (!f.s.empty()) throw UsageError("heatmap takes --grid, not --s");
  const auto c = build_config(f);
  const auto grid = hamrec::run_heatmap(c, f.jobs);
  std::ostringstream os;
  if (f.format == "json") {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& v : grid.cells) cells.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
    os << nlohmann::json{{"config", hamrec::to_json(c)},
                         {"s_values", grid.s_values},
                         {"M_values", grid.m_values},
                         {"success_rate", cells}}
              .dump(2)
       << '\n';
  } else {
    hamrec::write_heatmap_csv(os, grid);
  }
  emit(f.out, os.str());
  stamp_config(c, f.out);
  if (!f.svg.empty()) {
    std::ostringstream svg;
    hamrec::write_heatmap_svg(svg, grid);
    emit(f.svg, svg.str());
  }
  return 0;
}

int cmd_report(const Flags& f) {
  if (f.in.empty()) throw UsageError("report needs --in");
  std::ifstream is(f.in);
  if (!is) throw UsageError("cannot open " + f.in);
  const auto curves = hamrec::read_sweep_csv(is);
  nlohmann::json records = nlohmann::json::array();
  for (const auto& cs : curves) {
    if (cs.protocol != hamrec::Protocol::CS) continue;
    for (const auto& nocs : curves) {
      if (nocs.protocol != hamrec::Protocol::NoCS || nocs.n != cs.n || nocs.s != cs.s || nocs.policy != cs.policy ||
          nocs.eta_beta != cs.eta_beta || nocs.seed != cs.seed) {
        continue;
      }
      const double threshold = f.threshold.value_or(cs.threshold);
      nlohmann::json rec = hamrec::to_json(hamrec::speedup_report(cs, nocs, threshold));
      rec["n"] = cs.n;
      rec["s"] = cs.s;
      rec["policy"] = hamrec::to_string(cs.policy);
      rec["eta_beta"] = cs.eta_beta;
      rec["threshold"] = threshold;
      records.push_back(rec);
    }
  }
  if (records.empty()) throw DomainError("report: no CS/NoCS curve pair in " + f.in);
  emit(f.out, nlohmann::json{{"records", records}}.dump() + "\n");
  return 0;
}

int cmd_selftest(const Flags& f) {
  const auto results = hamrec::run_selftest(f.seed.value_or(1));
  bool all = true;
  for (const auto& r : results) {
    std::printf("%s %s (%.2fs)%s%s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                r.detail.empty() ? "" : ": ", r.detail.c_str());
    all = all && r.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse Hamiltonian reconstruction from thermal-state Pauli measurements"};
  app.require_subcommand(1);
  Flags f;

  auto* gen = app.add_subcommand("gen", "emit a random sparse Hamiltonian as JSON");
  add_model_flags(gen, f);
  gen->add_option("--out", f.out, "output path (default stdout)");

  auto* trial = app.add_subcommand("trial", "run one trial and print its JSON record");
  add_run_flags(trial, f);
  trial->add_option("--m", f.m, "number of measurements");
  trial->add_option("--protocol", f.protocol, "cs or nocs")->check(CLI::IsMember({"cs", "nocs"}));
  trial->add_option("--hamiltonian", f.hamiltonian, "Hamiltonian JSON from `gen` (else a random one)");

  auto* sweep = app.add_subcommand("sweep", "median error against M for both protocols");
  add_run_flags(sweep, f);
  add_m_flags(sweep, f);

  auto* heatmap = app.add_subcommand("heatmap", "CS success rate over the (M/N, s/N) grid");
  add_run_flags(heatmap, f);
  heatmap->add_option("--grid", f.grid, "cells per axis");

  auto* report = app.add_subcommand("report", "threshold crossings and speedups from a sweep CSV");
  report->add_option("--in", f.in, "sweep CSV");
  report->add_option("--threshold", f.threshold, "override the threshold stored in the CSV");
  report->add_option("--out", f.out, "output path (default stdout)");

  auto* selftest = app.add_subcommand("selftest", "run the built-in invariant checks");
  selftest->add_option("--seed", f.seed, "seed for the random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), 2);
  }

  try {
    if (*gen) return cmd_gen(f);
    if (*trial) return cmd_trial(f);
    if (*sweep) return cmd_sweep(f);
    if (*heatmap) return cmd_heatmap(f);
    if (*report) return cmd_report(f);
    if (*selftest) return cmd_selftest(f);
  } catch (const UsageError& e) {
    return report_error("usage", e.what(), 2);
  } catch (const DomainError& e) {
    return report_error("invalid-argument", e.what(), 2);
  } catch (const nlohmann::json::exception& e) {
    return report_error("invalid-argument", e.what(), 2);
  } catch (const std::exception& e) {
    return report_error("runtime", e.what(), 1);
  }
  return report_error("usage", "no subcommand", 2);
}
