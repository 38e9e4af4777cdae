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

#include "oracles.hpp"
#include "qnd/tradeoff.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace qnd {
namespace {

// Frozen with mpmath (30 digits) from the closed forms, beta from the
// normalization quadratic.
constexpr double kF_2_05 = 0.91666666666666667, kG_2_05 = 0.61023963796102461;
constexpr double kF_3_07 = 0.755, kG_3_07 = 0.4710985475831814;
constexpr double kF_5_03 = 0.94, kG_5_03 = 0.24166505476566082;
constexpr double kF_half_overlap = 0.90236892706218251, kG_half_overlap = 0.61785113019775792;
constexpr double kGapPiThird = 0.11785113019775792;

std::vector<double> alpha_grid() {
  std::vector<double> a;
  for (int k = 0; k <= 20; ++k) a.push_back(k / 20.0);
  return a;
}

TEST(BoundRhs, ExtremePoints) {
  EXPECT_NEAR(bound_rhs(2.0 / 3.0, 2), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(bound_rhs(0.5, 2), 1.0, 1e-15);
  EXPECT_NEAR(bound_rhs(1.0 / 3.0, 3), 1.0, 1e-15);
}

TEST(BoundRhs, DomainErrorsNameTheRadicand) {
  try {
    bound_rhs(0.2, 2);
    FAIL();
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("first radicand"), std::string::npos);
  }
  try {
    bound_rhs(0.7, 2);
    FAIL();
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("second radicand"), std::string::npos);
  }
}

TEST(AnalyticFg, KnownValues) {
  auto p = analytic_fg(2, 1.0);
  EXPECT_NEAR(p.F, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p.G, 2.0 / 3.0, 1e-15);
  p = analytic_fg(2, 0.0);
  EXPECT_NEAR(p.F, 1.0, 1e-15);
  EXPECT_NEAR(p.G, 0.5, 1e-15);
  p = analytic_fg(2, 0.5);
  EXPECT_NEAR(p.F, kF_2_05, 1e-14);
  EXPECT_NEAR(p.G, kG_2_05, 1e-14);
  p = analytic_fg(3, 0.7);
  EXPECT_NEAR(p.F, kF_3_07, 1e-14);
  EXPECT_NEAR(p.G, kG_3_07, 1e-14);
  p = analytic_fg(5, 0.3);
  EXPECT_NEAR(p.F, kF_5_03, 1e-14);
  EXPECT_NEAR(p.G, kG_5_03, 1e-14);
  EXPECT_THROW(analytic_fg(2, 1.5), std::invalid_argument);
}

TEST(AnalyticFg, SaturatesBoundEverywhere) {
  for (std::size_t d : {2u, 3u, 5u, 8u})
    for (double a : alpha_grid()) EXPECT_LE(std::abs(saturation_gap(analytic_fg(d, a), d)), 1e-12) << d << " " << a;
}

TEST(AnalyticFg, MonotoneAlongBoundary) {
  for (std::size_t d : {2u, 3u, 5u, 8u}) {
    const auto grid = alpha_grid();
    for (std::size_t k = 1; k < grid.size(); ++k) {
      // alpha decreasing from grid[k] to grid[k-1]: F up, G down.
      const auto hi = analytic_fg(d, grid[k]), lo = analytic_fg(d, grid[k - 1]);
      EXPECT_GT(lo.F, hi.F);
      EXPECT_LT(lo.G, hi.G);
    }
  }
}

TEST(KrausFg, ProjectiveAndIdentityChannels) {
  const auto proj = kraus_fg(kraus_qnd(make_ancilla(2, 1.0)), computational_basis(2));
  EXPECT_NEAR(proj.F, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(proj.G, 2.0 / 3.0, 1e-15);
  const auto id = kraus_fg(kraus_qnd(make_ancilla(2, 0.0)), computational_basis(2));
  EXPECT_NEAR(id.F, 1.0, 1e-15);
  EXPECT_NEAR(id.G, 0.5, 1e-15);
}

TEST(KrausFg, AgreesWithClosedFormAndCircuit) {
  for (std::size_t d : {2u, 3u, 5u})
    for (double a : alpha_grid()) {
      const auto an = analytic_fg(d, a);
      const auto prep = make_ancilla(d, a);
      const auto kq = kraus_fg(kraus_qnd(prep), computational_basis(d));
      const auto kc = kraus_fg(channel_from_circuit(cnot_qudit(d), prep.tau, computational_basis(d)), computational_basis(d));
      EXPECT_NEAR(kq.F, an.F, 1e-12);
      EXPECT_NEAR(kq.G, an.G, 1e-12);
      EXPECT_NEAR(kc.F, an.F, 1e-12);
      EXPECT_NEAR(kc.G, an.G, 1e-12);
    }
}

TEST(KrausFg, RejectsIncompleteChannel) {
  const auto bad = KrausChannel::unchecked(2, {CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)});
  EXPECT_THROW(kraus_fg(bad, computational_basis(2)), std::invalid_argument);
  EXPECT_THROW(kraus_fg(kraus_qnd(make_ancilla(2, 0.3)), computational_basis(3)), std::invalid_argument);
}

TEST(ImperfectFg, OrthonormalPointers) {
  const auto spec = QndSpec::qubit(0.0, 0.0);
  const auto p = imperfect_fg(spec, projective_povm(computational_basis(2)));
  EXPECT_NEAR(p.F, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p.G, 2.0 / 3.0, 1e-15);
}

TEST(ImperfectFg, MinimumErrorReadoutAtHalfOverlap) {
  const auto spec = QndSpec::qubit(0.5, 0.0);
  const auto p = imperfect_fg(spec, helstrom_povm(spec.pointers()[0], spec.pointers()[1]));
  EXPECT_NEAR(p.F, kF_half_overlap, 1e-12);
  EXPECT_NEAR(p.G, kG_half_overlap, 1e-12);
  EXPECT_LE(std::abs(saturation_gap(p, 2)), 1e-12);
}

TEST(ImperfectFg, IdenticalPointers) {
  const auto spec = QndSpec::qubit(1.0, 0.0);
  const auto p = imperfect_fg(spec, helstrom_povm(spec.pointers()[0], spec.pointers()[1]));
  EXPECT_NEAR(p.F, 1.0, 1e-12);
  EXPECT_NEAR(p.G, 0.5, 1e-12);
}

TEST(ImperfectFg, PhaseBreaksSaturationUnlessCorrected) {
  const auto spec = QndSpec::qubit(0.5, std::numbers::pi / 3);
  const auto h = helstrom_povm(spec.pointers()[0], spec.pointers()[1]);
  EXPECT_NEAR(saturation_gap(imperfect_fg(spec, h, PhaseHandling::Raw), 2), kGapPiThird, 1e-12);
  EXPECT_LE(std::abs(saturation_gap(imperfect_fg(spec, h, PhaseHandling::Corrected), 2)), 1e-12);
}

TEST(ImperfectFg, AgreesWithInstrumentOracle) {
  SeededRng rng(41, 0);
  for (int t = 0; t < 30; ++t) {
    const auto spec = QndSpec::with_pointers({haar_state(2, rng), haar_state(2, rng)});
    const auto h = helstrom_povm(spec.pointers()[0], spec.pointers()[1]);
    const auto raw = imperfect_fg(spec, h, PhaseHandling::Raw);
    const auto ref_raw = oracle::instrument_fg(spec, h, CMatrix::Identity(2, 2));
    EXPECT_NEAR(raw.F, ref_raw.F, 1e-12);
    EXPECT_NEAR(raw.G, ref_raw.G, 1e-12);
    const auto fixed = imperfect_fg(spec, h, PhaseHandling::Corrected);
    const auto ref_fixed = oracle::instrument_fg(spec, h, phase_correction(spec));
    EXPECT_NEAR(fixed.F, ref_fixed.F, 1e-12);
    EXPECT_NEAR(fixed.G, ref_fixed.G, 1e-12);
    EXPECT_LE(std::abs(saturation_gap(fixed, 2)), 1e-12);
    EXPECT_GE(saturation_gap(raw, 2), -1e-10);
    // Non-orthogonal pointers never reach G_max = 2/3.
    EXPECT_LT(fixed.G, 2.0 / 3.0);
  }
  // Qutrit with a projective readout on the orthonormalized pointers.
  for (int t = 0; t < 10; ++t) {
    const auto spec = QndSpec::with_pointers({haar_state(3, rng), haar_state(3, rng), haar_state(3, rng)});
    std::vector<CVector> v;
    for (const auto& m : spec.pointers()) v.push_back(m.amplitudes());
    const auto pr = projective_povm(orthonormalize(v));
    const auto got = imperfect_fg(spec, pr);
    const auto ref = oracle::instrument_fg(spec, pr, CMatrix::Identity(3, 3));
    EXPECT_NEAR(got.F, ref.F, 1e-12);
    EXPECT_NEAR(got.G, ref.G, 1e-12);
    EXPECT_GE(saturation_gap(got, 3), -1e-10);
  }
}

TEST(ImperfectFg, RejectsInconclusiveReadout) {
  const auto spec = QndSpec::qubit(0.5, 0.0);
  EXPECT_THROW(imperfect_fg(spec, unambiguous_povm(spec.pointers()[0], spec.pointers()[1])), std::invalid_argument);
}

TEST(SimulateRun, SwitchedOffCouplingReturnsInput) {
  const auto proto = Protocol::perfect(3, 0.0, false);
  SeededRng rng(42, 0);
  std::vector<int> counts(3, 0);
  const auto psi = haar_state(3, rng);
  const int n = 30000;
  for (int k = 0; k < n; ++k) {
    const auto rec = simulate_run(proto, psi, rng);
    EXPECT_LE(max_abs(rec.output.matrix() - psi.projector()), 1e-12);
    ++counts[static_cast<std::size_t>(rec.outcome.index)];
  }
  for (int c : counts) {
    const double p = 1.0 / 3.0, se = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(c / static_cast<double>(n), p, 4 * se);
  }
}

TEST(SimulateRun, ProjectiveLimitPreservesEigenstates) {
  const auto proto = Protocol::perfect(3, 1.0, false);
  SeededRng rng(43, 0);
  for (std::size_t k = 0; k < 3; ++k)
    for (int t = 0; t < 20; ++t) {
      const auto rec = simulate_run(proto, PureState::basis(3, k), rng);
      EXPECT_EQ(rec.outcome.index, static_cast<int>(k));
      EXPECT_LE(max_abs(rec.output.matrix() - projector(basis_vector(3, k))), 1e-12);
      EXPECT_NEAR(*rec.g, 1.0, 1e-12);
    }
}

TEST(SimulateRun, ConditionalStateMatchesKrausUpdate) {
  // Without twirl the conditional output must be A_r psi / ||A_r psi||.
  SeededRng rng(44, 0);
  for (std::size_t d : {2u, 4u}) {
    const auto proto = Protocol::perfect(d, 0.6, false);
    const auto ch = kraus_qnd(make_ancilla(d, 0.6));
    for (int t = 0; t < 20; ++t) {
      const auto psi = haar_state(d, rng);
      const auto rec = simulate_run(proto, psi, rng);
      const CVector post = ch[static_cast<std::size_t>(rec.outcome.index)] * psi.amplitudes();
      EXPECT_LE(max_abs(rec.output.matrix() - projector(post) / post.squaredNorm()), 1e-12);
    }
  }
}

TEST(McFg, MatchesClosedForm) {
  struct Case {
    std::size_t d;
    double a;
  };
  for (const auto c : {Case{2, 1.0}, Case{3, 0.7}}) {
    const auto mc = mc_fg(Protocol::perfect(c.d, c.a, true), 100000, 2026);
    const auto an = analytic_fg(c.d, c.a);
    EXPECT_NEAR(mc.point.F, an.F, 4 * *mc.point.se_F) << c.d;
    EXPECT_NEAR(mc.point.G, an.G, 4 * *mc.point.se_G) << c.d;
    EXPECT_EQ(*mc.point.n_samples, 100000u);
    EXPECT_DOUBLE_EQ(mc.conclusive.conclusive_fraction, 1.0);
  }
}

TEST(McFg, ImperfectMinErrorMatchesClosedForm) {
  const auto spec = QndSpec::qubit(0.3, 1.1);
  for (bool fix : {true, false}) {
    const auto proto = Protocol::imperfect(spec, Readout::MinError, true, fix);
    const auto mc = mc_fg(proto, 50000, 7);
    const auto an = imperfect_fg(spec, proto.readout(), fix ? PhaseHandling::Corrected : PhaseHandling::Raw);
    EXPECT_NEAR(mc.point.F, an.F, 4 * *mc.point.se_F);
    EXPECT_NEAR(mc.point.G, an.G, 4 * *mc.point.se_G);
  }
}

TEST(McFg, UnambiguousSubensemble) {
  const double o = 0.5;
  const auto mc = mc_fg(Protocol::imperfect(QndSpec::qubit(o, 0.0), Readout::Unambiguous, true, true), 100000, 99);
  const auto& c = mc.conclusive;
  EXPECT_NEAR(c.conclusive_fraction, 1.0 - std::sqrt(o), 4 * c.se_fraction);
  EXPECT_NEAR(c.G_C, 2.0 / 3.0, 4 * c.se_G_C);
  EXPECT_NEAR(c.F_C, 2.0 / 3.0, 4 * c.se_F_C);
  EXPECT_EQ(mc.misidentifications, 0u);
}

TEST(McFg, IndependentOfWorkerCountAndReproducible) {
  const auto proto = Protocol::perfect(3, 0.4, true);
  const auto a = mc_fg(proto, 5000, 17, 1), b = mc_fg(proto, 5000, 17, 4), c = mc_fg(proto, 5000, 17, 3);
  EXPECT_EQ(a.point.F, b.point.F);
  EXPECT_EQ(a.point.G, b.point.G);
  EXPECT_EQ(a.point.F, c.point.F);
  EXPECT_EQ(*a.point.se_F, *b.point.se_F);
  EXPECT_NE(a.point.F, mc_fg(proto, 5000, 18, 1).point.F);
  EXPECT_THROW(mc_fg(proto, 999, 1), std::invalid_argument);
}

TEST(McFg, RunRecordsReproduceTotals) {
  const auto proto = Protocol::perfect(2, 0.5, true);
  const std::size_t n = 2000;
  const auto mc = mc_fg(proto, n, 5, 2);
  double f = 0.0, g = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = run_sample(proto, 5, i);
    f += s.run.f;
    g += *s.run.g;
  }
  EXPECT_EQ(mc.point.F, f / static_cast<double>(n));
  EXPECT_EQ(mc.point.G, g / static_cast<double>(n));
}

TEST(McFg, OutputsArePhysicalStates) {
  for (const auto& proto : {Protocol::perfect(4, 0.3, true),
                            Protocol::imperfect(QndSpec::qubit(0.4, 0.5), Readout::Unambiguous, true, true)}) {
    for (std::size_t i = 0; i < 200; ++i) {
      const auto s = run_sample(proto, 123, i);
      // DensityMatrix construction already enforces the invariants; re-check explicitly.
      EXPECT_NEAR(s.run.output.matrix().trace().real(), 1.0, 1e-10);
      EXPECT_GE(min_eigenvalue(s.run.output.matrix()), -1e-10);
      EXPECT_GE(s.run.f, 0.0);
      EXPECT_LE(s.run.f, 1.0);
    }
  }
}

TEST(StateDependence, TwirlRemovesInputDependence) {
  const auto twirled = state_dependence(Protocol::perfect(2, 0.5, true), 40, 400, 3);
  const auto bare = state_dependence(Protocol::perfect(2, 0.5, false), 40, 400, 3);
  EXPECT_LE(twirled.spread, 3.0 * twirled.noise_floor);
  EXPECT_GE(bare.spread, 5.0 * twirled.noise_floor);
}

TEST(Protocol, RejectsUnsupportedConfigurations) {
  const auto qutrit = QndSpec::with_pointers({PureState::basis(3, 0), PureState::basis(3, 1), PureState::basis(3, 2)});
  EXPECT_THROW(Protocol::imperfect(qutrit, Readout::MinError, false, false), UnsupportedError);
  EXPECT_THROW(Protocol::imperfect(qutrit, Readout::Projective, false, true), UnsupportedError);
  EXPECT_THROW(Protocol::imperfect(QndSpec::qubit(0.5, 0), Readout::Custom, false, false), std::invalid_argument);
  EXPECT_THROW(Protocol::imperfect(QndSpec::qubit(1.0, 0), Readout::Unambiguous, false, false), std::invalid_argument);
}

}  // namespace
}  // namespace qnd
