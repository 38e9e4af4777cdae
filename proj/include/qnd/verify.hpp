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

// Self-check suite run by `qndsim verify`. Every check is deterministic for a
// given seed, so the JSON report is byte-identical across runs.

#pragma once

#include "qnd/tradeoff.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace qnd {

struct VerifyOptions {
  std::uint64_t seed = 20261015;
  std::size_t mc_samples = 20000;
  std::string inject_fault;  // "", "completeness", "povm" or "saturation"
};

struct Check {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=" or ">"
  double threshold = 0.0;
  bool passed = false;
};

struct VerifyReport {
  VerifyOptions options;
  std::vector<Check> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return !checks.empty();
  }

  nlohmann::ordered_json json() const {
    nlohmann::ordered_json j;
    j["tool"] = "qndsim verify";
    j["seed"] = options.seed;
    j["mc_samples"] = options.mc_samples;
    j["inject_fault"] = options.inject_fault;
    j["passed"] = passed();
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
      nlohmann::ordered_json e;
      e["name"] = c.name;
      e["passed"] = c.passed;
      if (std::isfinite(c.value))
        e["value"] = c.value;
      else
        e["value"] = nullptr;
      e["relation"] = c.relation;
      e["threshold"] = c.threshold;
      j["checks"].push_back(e);
    }
    return j;
  }
};

namespace detail {

inline Check at_most(std::string name, double value, double tol) {
  return {std::move(name), value, "<=", tol, value <= tol};
}
inline Check above(std::string name, double value, double floor) {
  return {std::move(name), value, ">", floor, value > floor};
}

}  // namespace detail

inline VerifyReport run_verification(const VerifyOptions& opt) {
  using detail::above;
  using detail::at_most;
  VerifyReport rep;
  rep.options = opt;
  auto& out = rep.checks;
  const std::vector<std::size_t> dims_all{2, 3, 5, 8};
  const std::vector<std::size_t> dims_small{2, 3, 5};
  const std::vector<double> alphas5{0.0, 0.25, 0.5, 0.75, 1.0};

  // Boundary saturation over the alpha grid.
  {
    double worst = 0.0;
    for (auto d : dims_all)
      for (int k = 0; k <= 20; ++k) {
        TradeoffPoint p = analytic_fg(d, k / 20.0);
        if (opt.inject_fault == "saturation" && d == 2 && k == 10) p.F -= 1e-6;
        worst = std::max(worst, std::abs(saturation_gap(p, d)));
      }
    out.push_back(at_most("saturation_grid", worst, 1e-12));
  }

  {
    double worst = 0.0;
    for (auto d : dims_all) {
      const double dd = static_cast<double>(d);
      const auto hi = analytic_fg(d, 1.0), lo = analytic_fg(d, 0.0);
      worst = std::max({worst, std::abs(hi.F - 2.0 / (dd + 1.0)), std::abs(hi.G - 2.0 / (dd + 1.0)),
                        std::abs(lo.F - 1.0), std::abs(lo.G - 1.0 / dd)});
    }
    out.push_back(at_most("extreme_points", worst, 1e-12));
  }

  // Closed form vs Kraus formulas vs CNOT circuit; completeness and QND fixed points.
  std::vector<KrausChannel> channels;
  std::vector<std::vector<CVector>> channel_bases;
  {
    double equiv = 0.0, elementwise = 0.0, ident = 0.0;
    for (auto d : dims_small)
      for (double a : alphas5) {
        const auto prep = make_ancilla(d, a);
        const auto closed = kraus_qnd(prep);
        const auto circuit = channel_from_circuit(cnot_qudit(d), prep.tau, computational_basis(d));
        const auto pa = analytic_fg(d, a), pk = kraus_fg(closed, computational_basis(d)),
                   pc = kraus_fg(circuit, computational_basis(d));
        equiv = std::max({equiv, std::abs(pa.F - pk.F), std::abs(pa.G - pk.G), std::abs(pa.F - pc.F),
                          std::abs(pa.G - pc.G)});
        for (std::size_t r = 0; r < d; ++r) elementwise = std::max(elementwise, max_abs(closed[r] - circuit[r]));
        if (a == 0.0) {
          const auto n = static_cast<Eigen::Index>(d);
          ident = std::max(ident, process_distance(closed, KrausChannel(d, {CMatrix::Identity(n, n)})));
        }
        channels.push_back(closed);
        channels.push_back(circuit);
        channel_bases.push_back(computational_basis(d));
        channel_bases.push_back(computational_basis(d));
      }
    out.push_back(at_most("triple_equivalence", equiv, 1e-12));
    out.push_back(at_most("circuit_equals_closed_form", elementwise, 1e-12));
    out.push_back(at_most("switch_off_is_identity", ident, 1e-12));
  }

  SeededRng rng(opt.seed, 0xC0FFEE);
  {
    double worst = 0.0, unit = 0.0;
    for (std::size_t d = 2; d <= 4; ++d)
      for (int trial = 0; trial < 5; ++trial) {
        std::vector<PureState> ptrs;
        for (std::size_t i = 0; i < d; ++i) ptrs.push_back(haar_state(d, rng));
        const auto spec = QndSpec::with_pointers(ptrs);
        const CMatrix u = qnd_unitary(spec);
        unit = std::max(unit, unitarity_residual(u));
        for (std::size_t i = 0; i < d; ++i) {
          const CVector in = tensor(spec.system_basis()[i], spec.fiducial().amplitudes());
          const CVector want = tensor(spec.system_basis()[i], ptrs[i].amplitudes());
          worst = std::max(worst, max_abs(u * in - want));
        }
        channels.push_back(channel_from_circuit(u, spec.fiducial(), computational_basis(d)));
        channel_bases.push_back(spec.system_basis());
      }
    out.push_back(at_most("qnd_unitary_unitarity", unit, 1e-10));
    out.push_back(at_most("qnd_unitary_pointer_map", worst, 1e-10));
  }

  {
    double worst = 0.0;
    for (std::size_t d = 2; d <= 5; ++d) {
      const auto n = static_cast<Eigen::Index>(d);
      const CVector kappa = CVector::Constant(n, 1.0 / std::sqrt(static_cast<double>(d)));
      for (int trial = 0; trial < 5; ++trial) {
        const CVector in = tensor(haar_state(d, rng).amplitudes(), kappa);
        worst = std::max(worst, max_abs(cnot_qudit(d) * in - in));
      }
    }
    out.push_back(at_most("cnot_switch_off", worst, 1e-12));
  }

  if (opt.inject_fault == "completeness") {
    auto ops = kraus_qnd(make_ancilla(2, 1.0)).operators();
    ops[0](0, 0) = std::sqrt(1.0 + 1e-3);
    channels.push_back(KrausChannel::unchecked(2, ops));
    channel_bases.push_back(computational_basis(2));
  }
  {
    double comp = 0.0, fixed = 0.0;
    for (std::size_t k = 0; k < channels.size(); ++k) {
      comp = std::max(comp, channels[k].completeness_residual());
      fixed = std::max(fixed, qnd_fixed_point_residual(channels[k], channel_bases[k]));
    }
    out.push_back(at_most("channel_completeness", comp, 1e-12));
    out.push_back(at_most("qnd_fixed_points", fixed, 1e-12));
  }

  // Discrimination.
  {
    double pos = 0.0, comp = 0.0, hel = 0.0, sym = 0.0, cross = 0.0, pinc = 0.0;
    std::vector<Povm> povms;
    for (int trial = 0; trial < 100; ++trial) {
      const auto m0 = haar_state(2, rng), m1 = haar_state(2, rng);
      const auto h = helstrom_povm(m0, m1);
      const double ov = std::norm(m0.inner(m1));
      hel = std::max(hel, std::abs(error_rate(h, {m0, m1}) - helstrom_error_rate(ov)));
      sym = std::max(sym, std::abs(error_rate(h, {m0, m1}) - error_rate(helstrom_povm(m1, m0), {m1, m0})));
      const auto u = unambiguous_povm(m0, m1);
      cross = std::max({cross, std::abs(m0.amplitudes().dot(u.elements[1] * m0.amplitudes())),
                        std::abs(m1.amplitudes().dot(u.elements[0] * m1.amplitudes()))});
      const double p_inc = 0.5 * (m0.amplitudes().dot(u.elements[2] * m0.amplitudes()).real() +
                                  m1.amplitudes().dot(u.elements[2] * m1.amplitudes()).real());
      pinc = std::max(pinc, std::abs(p_inc - std::abs(m0.inner(m1))));
      povms.push_back(h);
      povms.push_back(u);
    }
    if (opt.inject_fault == "povm") {
      Povm bad;
      bad.dim = 2;
      bad.elements = {CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)};
      bad.labels = {Outcome{0}, Outcome{1}};
      povms.push_back(bad);
    }
    for (const auto& p : povms) {
      const auto r = povm_validate(p);
      pos = std::max(pos, -r.min_eigenvalue);
      comp = std::max(comp, r.completeness_residual);
    }
    out.push_back(at_most("povm_positivity", pos, 1e-10));
    out.push_back(at_most("povm_completeness", comp, 1e-10));
    out.push_back(at_most("helstrom_error_rate", hel, 1e-10));
    out.push_back(at_most("helstrom_symmetry", sym, 1e-12));
    out.push_back(at_most("unambiguous_zero_crosstalk", cross, 1e-12));
    out.push_back(at_most("unambiguous_inconclusive_rate", pinc, 1e-10));
  }

  // Imperfect QND: overlap endpoints and the phase condition.
  {
    auto fg = [](double o, double phi, PhaseHandling ph) {
      const auto s = QndSpec::qubit(o, phi);
      return imperfect_fg(s, helstrom_povm(s.pointers()[0], s.pointers()[1]), ph);
    };
    const auto zero = fg(0.0, 0.0, PhaseHandling::Corrected), one = fg(1.0, 0.0, PhaseHandling::Corrected);
    out.push_back(at_most("overlap_endpoints",
                          std::max({std::abs(zero.F - 2.0 / 3), std::abs(zero.G - 2.0 / 3), std::abs(one.F - 1.0),
                                    std::abs(one.G - 0.5)}),
                          1e-12));
    const double phi = std::numbers::pi / 3;
    out.push_back(above("phase_unfixed_gap", saturation_gap(fg(0.5, phi, PhaseHandling::Raw), 2), 1e-3));
    out.push_back(at_most("phase_fixed_gap", std::abs(saturation_gap(fg(0.5, phi, PhaseHandling::Corrected), 2)), 1e-12));
  }

  // Linear algebra spot checks.
  {
    double pt = 0.0, eig = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const auto a = haar_state(3, rng), b = haar_state(2, rng);
      pt = std::max(pt, max_abs(partial_trace(tensor(a.projector(), b.projector()), 3, 2, Subsystem::B) -
                                a.projector()));
      const CMatrix u = haar_unitary(4, rng);
      RVector lam(4);
      lam << -1.0, 0.25, 0.5, 2.0;
      const CMatrix h = u * lam.cast<Complex>().asDiagonal() * u.adjoint();
      const auto e = hermitian_eig(0.5 * (h + h.adjoint()));
      eig = std::max(eig, max_abs(e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint() - h));
    }
    out.push_back(at_most("partial_trace_product", pt, 1e-12));
    out.push_back(at_most("hermitian_eig_reconstruction", eig, 1e-10));
  }

  // Monte Carlo agreement (z-scores).
  {
    const auto mc = mc_fg(Protocol::perfect(2, 0.5, true), opt.mc_samples, opt.seed);
    const auto an = analytic_fg(2, 0.5);
    out.push_back(at_most("mc_perfect_z", std::max(std::abs(mc.point.F - an.F) / *mc.point.se_F,
                                                   std::abs(mc.point.G - an.G) / *mc.point.se_G),
                          4.0));
    const auto um = mc_fg(Protocol::imperfect(QndSpec::qubit(0.5, 0.0), Readout::Unambiguous, true, true),
                          opt.mc_samples, opt.seed + 1);
    const auto& c = um.conclusive;
    out.push_back(at_most("mc_subensemble_z",
                          std::max({std::abs(c.conclusive_fraction - (1.0 - std::sqrt(0.5))) / c.se_fraction,
                                    std::abs(c.G_C - 2.0 / 3) / c.se_G_C, std::abs(c.F_C - 2.0 / 3) / c.se_F_C}),
                          4.0));
    out.push_back(at_most("mc_misidentifications", static_cast<double>(um.misidentifications), 0.0));
  }
  return rep;
}

}  // namespace qnd
