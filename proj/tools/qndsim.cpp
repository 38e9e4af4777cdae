// Copyright 2026 The qndsim Authors
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

// qndsim: sweeps, bound evaluation, protocol simulation and self-verification
// for the ancilla-controlled QND measurement.
//
// Exit codes: 0 ok, 1 verification failure, 2 usage error.

#include "qnd/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

namespace {

using namespace qnd;
using namespace qnd::cli;

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate and verify QND measurements on d-level systems"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string alpha_grid, overlap_grid, povm_file, format = "csv";
  std::string strategy = "minerror";
  std::uint64_t seed = 0;

  const std::map<std::string, Readout> strategies{{"projective", Readout::Projective},
                                                  {"minerror", Readout::MinError},
                                                  {"unambiguous", Readout::Unambiguous},
                                                  {"custom", Readout::Custom}};

  auto common = [&](CLI::App* sub, bool stochastic) {
    sub->add_option("--d", cfg.d, "Qudit dimension")->check(CLI::Range(2, 32));
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", cfg.out_path, "Output file (default stdout)");
    if (stochastic) {
      sub->add_option("--samples", cfg.n_samples, "Monte Carlo samples (0 disables MC columns in sweeps)");
      sub->add_option("--seed", seed, "Master seed (default: $QNDSIM_SEED)");
      sub->add_flag("--twirl,!--no-twirl", cfg.twirl, "Wrap the interaction in a random twirl");
    }
  };
  auto imperfect_opts = [&](CLI::App* sub) {
    sub->add_option("--strategy", strategy, "Ancilla readout")
        ->check(CLI::IsMember({"projective", "minerror", "unambiguous", "custom"}));
    sub->add_option("--povm-file", povm_file, "Custom POVM (JSON)");
    sub->add_flag("--phase-fix,!--no-phase-fix", cfg.phase_fix, "Remove the pointer-overlap phase");
    sub->add_option("--phi", cfg.phi, "Pointer overlap phase arg<mu_0|mu_1>");
  };

  auto* sweep_alpha = app.add_subcommand("sweep-alpha", "Move along the trade-off boundary in alpha");
  common(sweep_alpha, true);
  sweep_alpha->add_option("--alpha-grid", alpha_grid, "start:stop:steps (inclusive)");

  auto* sweep_overlap = app.add_subcommand("sweep-overlap", "Qubit pointer-overlap sweep");
  common(sweep_overlap, true);
  imperfect_opts(sweep_overlap);
  sweep_overlap->add_option("--overlap-grid", overlap_grid, "start:stop:steps (inclusive)");

  auto* bound = app.add_subcommand("bound", "Largest output fidelity F for a given G");
  common(bound, false);
  bound->add_option("--g", cfg.g_value, "Estimation fidelity G")->required();

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo for a single protocol");
  common(simulate, true);
  imperfect_opts(simulate);
  simulate->add_option("--alpha", cfg.alpha, "Ancilla weight alpha (perfect QND)");
  auto* overlap_opt = simulate->add_option("--overlap", "Pointer overlap O (imperfect qubit QND)");

  auto* verify = app.add_subcommand("verify", "Run the invariant suite and print a JSON report");
  verify->add_option("--samples", cfg.n_samples, "Monte Carlo samples per statistical check");
  verify->add_option("--seed", seed, "Master seed");
  verify->add_option("--inject-fault", cfg.inject_fault, "Negative control: completeness|povm|saturation");
  verify->add_option("--out", cfg.out_path, "Report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    auto* sub = app.get_subcommands().front();
    if (const auto* opt = sub->get_option_no_throw("--seed"); opt && opt->count()) {
      cfg.seed = seed;
    } else if (const char* env = std::getenv("QNDSIM_SEED")) {
      try {
        cfg.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw UsageError("QNDSIM_SEED must be an unsigned integer");
      }
    }
    cfg.format = format == "json" ? Format::Json : Format::Csv;
    cfg.strategy = strategies.at(strategy);
    if (!alpha_grid.empty()) cfg.alpha_grid = parse_grid(alpha_grid);
    if (!overlap_grid.empty()) cfg.overlap_grid = parse_grid(overlap_grid);
    if (!povm_file.empty()) cfg.custom_povm = load_povm_file(povm_file);

    if (sub == verify) {
      if (!verify->get_option("--samples")->count()) cfg.n_samples = 0;
      const auto report = cmd_verify(cfg);
      emit(report.json().dump(2) + "\n", cfg.out_path);
      for (const auto& c : report.checks)
        if (!c.passed) std::cerr << "FAILED " << c.name << ": " << c.value << " " << c.relation << " " << c.threshold
                                 << " does not hold\n";
      return report.passed() ? kExitOk : kExitVerifyFailed;
    }

    Table table;
    if (sub == sweep_alpha) {
      table = cmd_sweep_alpha(cfg);
    } else if (sub == sweep_overlap) {
      table = cmd_sweep_overlap(cfg);
    } else if (sub == bound) {
      table = cmd_bound(cfg);
    } else {
      if (overlap_opt->count()) cfg.overlap = overlap_opt->as<double>();
      table = cmd_simulate(cfg);
    }
    emit(render(table, cfg.format), cfg.out_path);
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
  } catch (const UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
  }
  return kExitUsage;
}
