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

/**
 * @file commands.hpp
 * @brief Command implementations behind the qndsim CLI: parameter sweeps,
 *        bound evaluation, single-protocol simulation and the verification
 *        suite. Output is a Table (CSV/JSON) or a VerifyReport (JSON).
 */

#pragma once

#include "qnd/tradeoff.hpp"
#include "qnd/verify.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnd::cli {

/// Bad command-line input; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

/// Inclusive uniform grid "start:stop:steps".
struct Grid {
  double start = 0.0;
  double stop = 1.0;
  std::size_t steps = 1;

  std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      if (steps == 1) {
        v.push_back(start);
      } else if (k + 1 == steps) {
        v.push_back(stop);  // exact endpoint
      } else {
        v.push_back(start + (stop - start) * static_cast<double>(k) / static_cast<double>(steps - 1));
      }
    }
    return v;
  }
};

inline Grid parse_grid(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
  if (c2 == std::string::npos || text.find(':', c2 + 1) != std::string::npos)
    throw UsageError("grid must look like start:stop:steps, got '" + text + "'");
  Grid g;
  try {
    std::size_t used = 0;
    const std::string a = text.substr(0, c1), b = text.substr(c1 + 1, c2 - c1 - 1), n = text.substr(c2 + 1);
    g.start = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    g.stop = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    const long long steps = std::stoll(n, &used);
    if (used != n.size() || steps < 1) throw std::invalid_argument(n);
    g.steps = static_cast<std::size_t>(steps);
  } catch (const std::logic_error&) {
    throw UsageError("malformed grid '" + text + "' (steps must be an integer >= 1)");
  }
  if (!std::isfinite(g.start) || !std::isfinite(g.stop)) throw UsageError("grid endpoints must be finite");
  return g;
}

enum class Command { SweepAlpha, SweepOverlap, Bound, Simulate, Verify };
enum class Format { Csv, Json };

struct RunConfig {
  Command command = Command::SweepAlpha;
  std::size_t d = 2;
  Grid alpha_grid{0.0, 1.0, 11};
  Grid overlap_grid{0.0, 1.0, 11};
  std::size_t n_samples = 100000;
  std::optional<std::uint64_t> seed;
  Readout strategy = Readout::MinError;
  std::optional<Povm> custom_povm;
  bool twirl = true;
  bool phase_fix = true;
  double phi = 0.0;  // pointer overlap phase for overlap sweeps / imperfect simulation
  double g_value = 0.0;  // bound command
  double alpha = 0.5;    // simulate, perfect QND
  std::optional<double> overlap;  // simulate: imperfect QND when set
  Format format = Format::Csv;
  std::string out_path;  // empty: stdout
  std::string inject_fault;  // verify negative controls
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// 12 significant digits, shortest form ("%.12g"), locale independent.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop negative zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

inline void write_csv(const Table& t, std::ostream& os) {
  for (std::size_t c = 0; c < t.header.size(); ++c) os << (c ? "," : "") << t.header[c];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_number(row[c]);
    os << "\n";
  }
}

/// {"columns": [...], "rows": [{col: value}, ...]}; non-finite values become null.
inline nlohmann::ordered_json table_json(const Table& t) {
  nlohmann::ordered_json j;
  j["columns"] = t.header;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (std::isfinite(row[c]))
        r[t.header[c]] = row[c];
      else
        r[t.header[c]] = nullptr;
    }
    j["rows"].push_back(r);
  }
  return j;
}

inline std::string render(const Table& t, Format f) {
  std::ostringstream os;
  if (f == Format::Csv)
    write_csv(t, os);
  else
    os << table_json(t).dump(2) << "\n";
  return os.str();
}

inline std::uint64_t require_seed(const RunConfig& c) {
  if (!c.seed) throw UsageError("a seed is required (--seed or QNDSIM_SEED)");
  return *c.seed;
}

/// Per-row seed so rows are independent of each other and of the grid size.
inline std::uint64_t row_seed(std::uint64_t seed, std::size_t row) {
  return SeededRng(seed, 0x5eed0000ULL + row).next_u64();
}

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline const std::vector<std::string>& sweep_alpha_columns() {
  static const std::vector<std::string> cols{"alpha", "beta", "F_analytic", "G_analytic", "F_mc", "G_mc",
                                             "se_F", "se_G", "F_bound_at_G", "saturation_gap"};
  return cols;
}

inline const std::vector<std::string>& sweep_overlap_columns() {
  static const std::vector<std::string> cols{"O", "F_minerror", "G_minerror", "F_mc", "G_mc", "P_e",
                                             "P_I", "G_C_mc", "F_C_mc", "saturation_gap"};
  return cols;
}

/// Moves along the trade-off boundary with the ancilla weight alpha.
/// MC columns are nan when n_samples is 0.
inline Table cmd_sweep_alpha(const RunConfig& c) {
  if (c.d < 2) throw UsageError("--d must be >= 2");
  for (double a : c.alpha_grid.values())
    if (!(a >= 0.0 && a <= 1.0)) throw UsageError("alpha grid must lie within [0, 1]");
  if (c.n_samples != 0 && c.n_samples < 1000) throw UsageError("--samples must be 0 or >= 1000");
  const std::uint64_t seed = c.n_samples ? require_seed(c) : 0;

  Table t{sweep_alpha_columns(), {}};
  const auto alphas = c.alpha_grid.values();
  for (std::size_t row = 0; row < alphas.size(); ++row) {
    const double a = alphas[row];
    const TradeoffPoint p = analytic_fg(c.d, a);
    double f_mc = kNaN, g_mc = kNaN, se_f = kNaN, se_g = kNaN;
    if (c.n_samples) {
      const auto mc = mc_fg(Protocol::perfect(c.d, a, c.twirl), c.n_samples, row_seed(seed, row));
      f_mc = mc.point.F;
      g_mc = mc.point.G;
      se_f = *mc.point.se_F;
      se_g = *mc.point.se_G;
    }
    const double bound = bound_rhs(p.G, c.d);
    t.rows.push_back({a, ancilla_beta(c.d, a), p.F, p.G, f_mc, g_mc, se_f, se_g, bound, bound - p.F});
  }
  return t;
}

/// Qubit pointer overlap sweep: closed-form minimum-error fidelities plus
/// Monte Carlo for the chosen readout and for unambiguous readout.
inline Table cmd_sweep_overlap(const RunConfig& c) {
  if (c.d != 2) throw UnsupportedError("sweep-overlap is defined for d = 2 only");
  for (double o : c.overlap_grid.values())
    if (!(o >= 0.0 && o <= 1.0)) throw UsageError("overlap grid must lie within [0, 1]");
  if (c.n_samples != 0 && c.n_samples < 1000) throw UsageError("--samples must be 0 or >= 1000");
  if (c.strategy == Readout::Custom && !c.custom_povm) throw UsageError("--strategy custom needs --povm-file");
  const std::uint64_t seed = c.n_samples ? require_seed(c) : 0;
  const PhaseHandling ph = c.phase_fix ? PhaseHandling::Corrected : PhaseHandling::Raw;

  Table t{sweep_overlap_columns(), {}};
  const auto overlaps = c.overlap_grid.values();
  for (std::size_t row = 0; row < overlaps.size(); ++row) {
    const double o = overlaps[row];
    const QndSpec spec = QndSpec::qubit(o, c.phi);
    const Povm helstrom = helstrom_povm(spec.pointers()[0], spec.pointers()[1]);
    const TradeoffPoint p = imperfect_fg(spec, helstrom, ph);
    const double pe = error_rate(helstrom, spec.pointers());
    const double pi = std::abs(spec.pointers()[0].inner(spec.pointers()[1]));
    const bool independent = 1.0 - pi > 1e-12;

    double f_mc = kNaN, g_mc = kNaN, gc = kNaN, fc = kNaN;
    if (c.n_samples) {
      const std::uint64_t s = row_seed(seed, row);
      const bool needs_independent = c.strategy == Readout::Unambiguous || c.strategy == Readout::Projective;
      if (!needs_independent || independent) {
        const auto proto = Protocol::imperfect(spec, c.strategy, c.twirl, c.phase_fix, c.custom_povm);
        const auto mc = mc_fg(proto, c.n_samples, s);
        f_mc = mc.point.F;
        g_mc = mc.point.G;
      }
      if (independent) {
        const auto proto = Protocol::imperfect(spec, Readout::Unambiguous, c.twirl, c.phase_fix);
        const auto mc = mc_fg(proto, c.n_samples, SeededRng(s, 1).next_u64());
        gc = mc.conclusive.G_C;
        fc = mc.conclusive.F_C;
      }
    }
    t.rows.push_back({o, p.F, p.G, f_mc, g_mc, pe, pi, gc, fc, saturation_gap(p, 2)});
  }
  return t;
}

/// F_max for one G.
inline Table cmd_bound(const RunConfig& c) {
  if (c.d < 2) throw UsageError("--d must be >= 2");
  double f;
  try {
    f = bound_rhs(c.g_value, c.d);
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  return {{"d", "G", "F_max"}, {{static_cast<double>(c.d), c.g_value, f}}};
}

/// One protocol configuration, Monte Carlo against the closed form.
inline Table cmd_simulate(const RunConfig& c) {
  if (c.n_samples < 1000) throw UsageError("--samples must be >= 1000");
  const std::uint64_t seed = require_seed(c);
  Table t{{"d", "alpha", "O", "F_analytic", "G_analytic", "F_mc", "G_mc", "se_F", "se_G",
           "conclusive_fraction", "F_C_mc", "G_C_mc", "saturation_gap"},
          {}};
  if (c.overlap) {
    if (!(*c.overlap >= 0.0 && *c.overlap <= 1.0)) throw UsageError("--overlap must lie within [0, 1]");
    if (c.d != 2) throw UnsupportedError("imperfect QND simulation with --overlap is qubit-only");
    const QndSpec spec = QndSpec::qubit(*c.overlap, c.phi);
    const auto proto = Protocol::imperfect(spec, c.strategy, c.twirl, c.phase_fix, c.custom_povm);
    const auto mc = mc_fg(proto, c.n_samples, seed);
    double fa = kNaN, ga = kNaN, gap = kNaN;
    if (!proto.readout().has_inconclusive()) {
      const auto p = imperfect_fg(spec, proto.readout(), c.phase_fix ? PhaseHandling::Corrected : PhaseHandling::Raw);
      fa = p.F;
      ga = p.G;
      gap = saturation_gap(p, 2);
    }
    t.rows.push_back({2.0, kNaN, *c.overlap, fa, ga, mc.point.F, mc.point.G, *mc.point.se_F, *mc.point.se_G,
                      mc.conclusive.conclusive_fraction, mc.conclusive.F_C, mc.conclusive.G_C, gap});
    return t;
  }
  if (c.d < 2) throw UsageError("--d must be >= 2");
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) throw UsageError("--alpha must lie within [0, 1]");
  const auto p = analytic_fg(c.d, c.alpha);
  const auto mc = mc_fg(Protocol::perfect(c.d, c.alpha, c.twirl), c.n_samples, seed);
  t.rows.push_back({static_cast<double>(c.d), c.alpha, kNaN, p.F, p.G, mc.point.F, mc.point.G, *mc.point.se_F,
                    *mc.point.se_G, mc.conclusive.conclusive_fraction, mc.conclusive.F_C, mc.conclusive.G_C,
                    saturation_gap(p, c.d)});
  return t;
}

// ---------------------------------------------------------------------------
// POVM files: {"elements": [matrix, ...], "labels": [0, 1, "inconclusive"]}
// or a bare array of matrices (labels 0..k-1). A matrix is an array of rows,
// each row an array of [re, im] pairs.

inline CMatrix parse_complex_matrix(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw UsageError("POVM element must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().is_array() ? j.front().size() : 0);
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw UsageError("POVM element rows must have equal length");
    for (Eigen::Index col = 0; col < cols; ++col) {
      const auto& z = row[static_cast<std::size_t>(col)];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
        throw UsageError("POVM entries must be [re, im] pairs");
      m(r, col) = Complex(z[0].get<double>(), z[1].get<double>());
    }
  }
  if (rows != cols) throw UsageError("POVM elements must be square");
  return m;
}

inline Povm parse_povm(const nlohmann::json& j) {
  const nlohmann::json* elements = &j;
  const nlohmann::json* labels = nullptr;
  if (j.is_object()) {
    if (!j.contains("elements")) throw UsageError("POVM object needs an \"elements\" array");
    elements = &j.at("elements");
    if (j.contains("labels")) labels = &j.at("labels");
  }
  if (!elements->is_array() || elements->empty()) throw UsageError("POVM needs at least one element");
  Povm p;
  for (const auto& e : *elements) p.elements.push_back(parse_complex_matrix(e));
  p.dim = static_cast<std::size_t>(p.elements.front().rows());
  for (const auto& e : p.elements)
    if (static_cast<std::size_t>(e.rows()) != p.dim) throw UsageError("POVM elements differ in size");
  if (labels) {
    if (!labels->is_array() || labels->size() != p.elements.size())
      throw UsageError("POVM labels must match the element count");
    for (const auto& l : *labels) {
      if (l.is_string() && l.get<std::string>() == "inconclusive")
        p.labels.push_back(Outcome::inconclusive());
      else if (l.is_number_integer() && l.get<long long>() >= 0)
        p.labels.push_back(Outcome{l.get<int>()});
      else
        throw UsageError("POVM labels must be nonnegative integers or \"inconclusive\"");
    }
  } else {
    for (std::size_t k = 0; k < p.elements.size(); ++k) p.labels.push_back(Outcome{static_cast<int>(k)});
  }
  const auto rep = povm_validate(p);
  if (!rep.valid) throw UsageError("POVM file is not a valid POVM: " + rep.problem);
  return p;
}

inline Povm load_povm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open POVM file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("POVM file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_povm(j);
}

inline VerifyReport cmd_verify(const RunConfig& c) {
  VerifyOptions opt;
  opt.seed = c.seed.value_or(opt.seed);
  if (c.n_samples) opt.mc_samples = c.n_samples;
  if (opt.mc_samples < 1000) throw UsageError("--samples must be >= 1000 for verify");
  opt.inject_fault = c.inject_fault;
  if (!opt.inject_fault.empty() && opt.inject_fault != "completeness" && opt.inject_fault != "povm" &&
      opt.inject_fault != "saturation")
    throw UsageError("unknown fault '" + opt.inject_fault + "' (completeness|povm|saturation)");
  return run_verification(opt);
}

}  // namespace qnd::cli
