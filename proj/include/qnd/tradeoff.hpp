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
 * @file tradeoff.hpp
 * @brief Estimation fidelity G versus output fidelity F: the tight bound,
 *        closed-form and Kraus-based fidelities, and Monte Carlo estimates
 *        from simulating the full measurement protocol.
 */

#pragma once

#include "qnd/channel.hpp"
#include "qnd/discrimination.hpp"
#include "qnd/qlinalg.hpp"
#include "qnd/states.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qnd {

struct TradeoffPoint {
  double F = 0.0;
  double G = 0.0;
  std::optional<double> se_F;
  std::optional<double> se_G;
  std::optional<std::size_t> n_samples;
};

struct SubensembleStats {
  double conclusive_fraction = 0.0;
  double se_fraction = 0.0;
  double F_C = std::numeric_limits<double>::quiet_NaN();
  double se_F_C = std::numeric_limits<double>::quiet_NaN();
  double G_C = std::numeric_limits<double>::quiet_NaN();
  double se_G_C = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_conclusive = 0;
};

// ---------------------------------------------------------------------------
// Closed forms

/**
 * Largest output fidelity compatible with estimation fidelity G:
 *   1/(d+1) + [sqrt(G - 1/(d+1)) + sqrt((d-1)(2/(d+1) - G))]^2.
 * Requires G in [1/(d+1), 2/(d+1)]; radicands within 1e-12 of zero are clamped.
 */
inline double bound_rhs(double G, std::size_t dim) {
  if (dim < 2) throw std::invalid_argument("bound_rhs: dimension must be >= 2");
  const double d = static_cast<double>(dim);
  const double lower = G - 1.0 / (d + 1.0);
  const double upper = 2.0 / (d + 1.0) - G;
  constexpr double kSlack = 1e-12;
  if (!(lower >= -kSlack))
    throw std::domain_error("bound_rhs: G = " + std::to_string(G) +
                            " is below 1/(d+1) (first radicand negative)");
  if (!(upper >= -kSlack))
    throw std::domain_error("bound_rhs: G = " + std::to_string(G) +
                            " exceeds 2/(d+1) (second radicand negative)");
  const double root = std::sqrt(std::max(lower, 0.0)) + std::sqrt((d - 1.0) * std::max(upper, 0.0));
  return 1.0 / (d + 1.0) + root * root;
}

/// bound_rhs(G) - F: zero on the boundary, positive inside the allowed region.
inline double saturation_gap(const TradeoffPoint& p, std::size_t dim) {
  return bound_rhs(p.G, dim) - p.F;
}

/// Fidelities of the ancilla-controlled QND measurement with weight alpha on |mu>.
inline TradeoffPoint analytic_fg(std::size_t dim, double alpha) {
  const double beta = ancilla_beta(dim, alpha);
  const double d = static_cast<double>(dim);
  const double sd = std::sqrt(d);
  const double f = alpha + sd * beta;
  const double g = alpha + beta / sd;
  return {(1.0 + f * f) / (d + 1.0), (1.0 + g * g) / (d + 1.0), {}, {}, {}};
}

/**
 * Mean fidelities of a deterministic operation {A_r} where outcome r makes
 * Eve prepare |a_r>:
 *   F = (d + sum_r |tr A_r|^2) / (d(d+1)),
 *   G = (d + sum_r <a_r|A_r^dagger A_r|a_r>) / (d(d+1)).
 */
inline TradeoffPoint kraus_fg(const KrausChannel& ch, const std::vector<CVector>& estimate_basis) {
  const double res = ch.completeness_residual();
  if (res > TOL_COMPLETE)
    throw std::invalid_argument("kraus_fg: channel is incomplete (residual " + std::to_string(res) + ")");
  if (estimate_basis.size() != ch.size())
    throw std::invalid_argument("kraus_fg: need one estimate state per Kraus operator");
  const double d = static_cast<double>(ch.dim());
  double tr_sum = 0.0, est_sum = 0.0;
  for (std::size_t r = 0; r < ch.size(); ++r) {
    tr_sum += std::norm(ch[r].trace());
    const CVector& a = estimate_basis[r];
    est_sum += a.dot(ch[r].adjoint() * ch[r] * a).real();
  }
  return {(d + tr_sum) / (d * (d + 1.0)), (d + est_sum) / (d * (d + 1.0)), {}, {}, {}};
}

enum class PhaseHandling { Corrected, Raw };

/**
 * Fidelities of an imperfect QND coupling read out by `readout`:
 *   G = (2 - P_e)/(d+1),  F = (2 + (1/d) sum_{i != j} <mu_i|mu_j>)/(d+1).
 * With PhaseHandling::Corrected (qubits only) the overlap phase is removed
 * first, so the Gram sum becomes 2|<mu_0|mu_1>|. For d > 2 the raw Gram sum
 * is always used.
 */
inline TradeoffPoint imperfect_fg(const QndSpec& spec, const Povm& readout,
                                  PhaseHandling phase = PhaseHandling::Corrected) {
  if (readout.has_inconclusive())
    throw std::invalid_argument("imperfect_fg: inconclusive readout; use subensemble statistics");
  const double d = static_cast<double>(spec.dim());
  const double pe = error_rate(readout, spec.pointers());
  const CMatrix gram = spec.gram();
  Complex off = gram.sum() - gram.trace();
  if (spec.dim() == 2 && phase == PhaseHandling::Corrected) off = 2.0 * std::abs(gram(0, 1));
  if (std::abs(off.imag()) > 1e-10)
    std::cerr << "imperfect_fg: warning: Gram off-diagonal sum has imaginary part " << off.imag() << "\n";
  return {(2.0 + off.real() / d) / (d + 1.0), (2.0 - pe) / (d + 1.0), {}, {}, {}};
}

// ---------------------------------------------------------------------------
// Protocol simulation

enum class Readout { Projective, MinError, Unambiguous, Custom };

inline std::string to_string(Readout r) {
  switch (r) {
    case Readout::Projective: return "projective";
    case Readout::MinError: return "minerror";
    case Readout::Unambiguous: return "unambiguous";
    case Readout::Custom: return "custom";
  }
  return "unknown";
}

/**
 * A fully assembled measurement protocol: coupling unitary on S (x) A,
 * prepared ancilla, ancilla POVM, the states Eve prepares per outcome, an
 * optional phase fix on the system and an optional twirl.
 */
class Protocol {
 public:
  /// CNOT coupling with ancilla alpha|0> + beta|kappa>, computational readout.
  static Protocol perfect(std::size_t dim, double alpha, bool twirl) {
    Protocol p;
    p.dim_ = dim;
    p.coupling_ = cnot_qudit(dim);
    p.tau_ = make_ancilla(dim, alpha).tau;
    p.readout_ = projective_povm(computational_basis(dim));
    p.estimates_ = computational_basis(dim);
    p.twirl_ = twirl;
    p.readout_kind_ = Readout::Projective;
    return p;
  }

  /**
   * Coupling |a_i>|mu> -> |a_i>|mu_i>, ancilla prepared in |mu>.
   *
   * Projective readout measures the Gram-Schmidt orthonormalization of the
   * pointer states; MinError and Unambiguous are the qubit constructions;
   * Custom uses `custom_povm`. The phase fix is qubit-only.
   */
  static Protocol imperfect(const QndSpec& spec, Readout readout, bool twirl, bool phase_fix,
                            std::optional<Povm> custom_povm = std::nullopt) {
    Protocol p;
    p.dim_ = spec.dim();
    p.coupling_ = qnd_unitary(spec);
    p.tau_ = spec.fiducial();
    p.estimates_ = spec.system_basis();
    p.twirl_ = twirl;
    p.readout_kind_ = readout;
    const auto& mu = spec.pointers();
    switch (readout) {
      case Readout::Projective: {
        std::vector<CVector> v;
        for (const auto& m : mu) v.push_back(m.amplitudes());
        p.readout_ = projective_povm(orthonormalize(v));
        break;
      }
      case Readout::MinError:
        if (p.dim_ != 2) throw UnsupportedError("Protocol: minimum-error readout is qubit-only");
        p.readout_ = helstrom_povm(mu[0], mu[1]);
        break;
      case Readout::Unambiguous:
        if (p.dim_ != 2) throw UnsupportedError("Protocol: unambiguous readout is qubit-only");
        p.readout_ = unambiguous_povm(mu[0], mu[1]);
        break;
      case Readout::Custom: {
        if (!custom_povm) throw std::invalid_argument("Protocol: custom readout needs a POVM");
        const auto rep = povm_validate(*custom_povm);
        if (!rep.valid) throw std::invalid_argument("Protocol: custom POVM invalid (" + rep.problem + ")");
        if (custom_povm->dim != p.dim_) throw std::invalid_argument("Protocol: custom POVM dimension mismatch");
        for (auto o : custom_povm->labels)
          if (o.conclusive() && static_cast<std::size_t>(o.index) >= p.dim_)
            throw std::invalid_argument("Protocol: custom POVM label out of range");
        p.readout_ = *custom_povm;
        break;
      }
    }
    if (phase_fix) p.phase_ = phase_correction(spec);
    return p;
  }

  std::size_t dim() const { return dim_; }
  bool twirl() const { return twirl_; }
  Readout readout_kind() const { return readout_kind_; }
  const CMatrix& coupling() const { return coupling_; }
  const PureState& ancilla() const { return *tau_; }
  const Povm& readout() const { return readout_; }
  const std::vector<CVector>& estimates() const { return estimates_; }
  const std::optional<CMatrix>& phase_fix() const { return phase_; }

 private:
  Protocol() = default;

  std::size_t dim_ = 0;
  CMatrix coupling_;
  std::optional<PureState> tau_;
  Povm readout_;
  std::vector<CVector> estimates_;
  std::optional<CMatrix> phase_;
  bool twirl_ = false;
  Readout readout_kind_ = Readout::Projective;
};

struct RunRecord {
  DensityMatrix output;               // Bob's state, conditioned on the outcome
  std::optional<PureState> estimate;  // Eve's prepared state; empty if inconclusive
  Outcome outcome;
  double f = 0.0;                     // <psi|output|psi>
  std::optional<double> g;            // |<psi|estimate>|^2
  /// Weight of Bob's conditional state (interaction frame) outside |a_r>;
  /// zero for an error-free conclusive identification.
  double crosstalk = 0.0;
};

/**
 * One run: twirl T -> couple T|psi> with the ancilla -> sample the ancilla
 * outcome -> condition and trace out the ancilla -> phase fix -> undo the twirl.
 * Eve prepares T^dagger |a_r>. The twirl is drawn from `rng` before the outcome.
 */
inline RunRecord simulate_run(const Protocol& protocol, const PureState& psi, SeededRng& rng) {
  const std::size_t d = protocol.dim();
  if (psi.dim() != d) throw std::invalid_argument("simulate_run: input dimension mismatch");
  const auto n = static_cast<Eigen::Index>(d);
  const auto na = static_cast<Eigen::Index>(protocol.ancilla().dim());

  const CMatrix twirl = protocol.twirl() ? haar_unitary(d, rng) : CMatrix::Identity(n, n);
  const CVector joint = protocol.coupling() * tensor(CVector(twirl * psi.amplitudes()),
                                                     protocol.ancilla().amplitudes());
  // joint(i * na + a) -> amps(i, a)
  CMatrix amps(n, na);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index a = 0; a < na; ++a) amps(i, a) = joint(i * na + a);

  const auto& povm = protocol.readout();
  std::vector<CMatrix> branches;
  std::vector<double> probs;
  branches.reserve(povm.elements.size());
  for (const auto& e : povm.elements) {
    // tr_A[(I (x) E)|joint><joint|] = amps E^T amps^dagger
    branches.push_back(amps * e.transpose() * amps.adjoint());
    probs.push_back(branches.back().trace().real());
  }
  const std::size_t k = sample_index(probs, rng);
  const Outcome outcome = povm.labels[k];

  CMatrix bob = branches[k] / probs[k];
  double crosstalk = 0.0;
  if (outcome.conclusive()) {
    const CVector& a = protocol.estimates()[static_cast<std::size_t>(outcome.index)];
    crosstalk = std::max(0.0, 1.0 - a.dot(bob * a).real());
  }
  if (protocol.phase_fix()) bob = *protocol.phase_fix() * bob * protocol.phase_fix()->adjoint();
  bob = twirl.adjoint() * bob * twirl;
  bob = 0.5 * (bob + bob.adjoint());

  RunRecord rec{DensityMatrix(bob), std::nullopt, outcome, 0.0, std::nullopt, crosstalk};
  rec.f = fidelity(psi, rec.output);
  if (outcome.conclusive()) {
    rec.estimate = PureState::normalized(
        twirl.adjoint() * protocol.estimates()[static_cast<std::size_t>(outcome.index)]);
    rec.g = fidelity(psi, *rec.estimate);
  }
  return rec;
}

struct SampleRecord {
  PureState input;
  RunRecord run;
};

/// Sample `index` of a Monte Carlo run: Haar input and run, both from stream (seed, index).
inline SampleRecord run_sample(const Protocol& protocol, std::uint64_t seed, std::uint64_t index) {
  SeededRng rng(seed, index);
  PureState psi = haar_state(protocol.dim(), rng);
  RunRecord rec = simulate_run(protocol, psi, rng);
  return {std::move(psi), std::move(rec)};
}

struct McResult {
  /// F over all runs; G over conclusive runs (all runs for deterministic readouts).
  TradeoffPoint point;
  SubensembleStats conclusive;
  std::size_t misidentifications = 0;  // conclusive runs with crosstalk > TOL_PSD
};

namespace detail {

struct Moments {
  double sum = 0.0, sum_sq = 0.0;
  std::size_t count = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  double mean() const { return count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN(); }
  /// Standard error of the mean from the unbiased sample variance.
  double standard_error() const {
    if (count < 2) return std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(count);
    const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
    return std::sqrt(var / n);
  }
};

struct SampleSummary {
  double f = 0.0;
  double g = 0.0;
  bool conclusive = false;
  bool misidentified = false;
};

inline unsigned worker_count(unsigned requested, std::size_t n) {
  unsigned w = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(n, 1)));
}

}  // namespace detail

/**
 * Monte Carlo estimate of (F, G) over n Haar-random inputs.
 *
 * Sample i uses stream (seed, i) only, and the reduction runs in sample
 * order, so the result is bit-identical for any worker count.
 */
inline McResult mc_fg(const Protocol& protocol, std::size_t n, std::uint64_t seed, unsigned workers = 0) {
  if (n < 1000) throw std::invalid_argument("mc_fg: need at least 1000 samples");
  std::vector<detail::SampleSummary> samples(n);
  const unsigned w = detail::worker_count(workers, n);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto s = run_sample(protocol, seed, i);
      samples[i] = {s.run.f, s.run.g.value_or(0.0), s.run.outcome.conclusive(),
                    s.run.outcome.conclusive() && s.run.crosstalk > TOL_PSD};
    }
  };
  if (w == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + w - 1) / w;
    for (unsigned t = 0; t < w; ++t) {
      const std::size_t b = t * chunk, e = std::min(n, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }

  detail::Moments f_all, f_c, g_c, frac;
  McResult out;
  for (const auto& s : samples) {
    f_all.add(s.f);
    frac.add(s.conclusive ? 1.0 : 0.0);
    if (s.conclusive) {
      f_c.add(s.f);
      g_c.add(s.g);
    }
    if (s.misidentified) ++out.misidentifications;
  }
  out.point = {f_all.mean(), g_c.mean(), f_all.standard_error(), g_c.standard_error(), n};
  out.conclusive = {frac.mean(), frac.standard_error(), f_c.mean(), f_c.standard_error(),
                    g_c.mean(), g_c.standard_error(), f_c.count};
  return out;
}

struct StateDependence {
  std::vector<double> state_means;  // mean f per input state
  double spread = 0.0;              // sample stddev of state_means
  double noise_floor = 0.0;         // sqrt(pooled within-state variance / runs)
};

/**
 * Output fidelity per fixed input state: `states` Haar inputs (stream
 * (seed, s)), each run `runs` times on substreams of that stream. Compares
 * the spread of the per-state means with the spread expected from run-to-run
 * noise alone.
 */
inline StateDependence state_dependence(const Protocol& protocol, std::size_t states, std::size_t runs,
                                        std::uint64_t seed) {
  if (states < 2 || runs < 2) throw std::invalid_argument("state_dependence: need >= 2 states and runs");
  StateDependence out;
  double pooled = 0.0;
  detail::Moments across;
  for (std::size_t s = 0; s < states; ++s) {
    SeededRng state_rng(seed, s);
    const PureState psi = haar_state(protocol.dim(), state_rng);
    detail::Moments within;
    for (std::size_t r = 0; r < runs; ++r) {
      SeededRng run_rng = state_rng.substream(r);
      within.add(simulate_run(protocol, psi, run_rng).f);
    }
    const double se = within.standard_error();
    pooled += se * se * static_cast<double>(runs);
    out.state_means.push_back(within.mean());
    across.add(within.mean());
  }
  out.spread = across.standard_error() * std::sqrt(static_cast<double>(states));
  out.noise_floor = std::sqrt(pooled / static_cast<double>(states) / static_cast<double>(runs));
  return out;
}

}  // namespace qnd
