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
 * @file discrimination.hpp
 * @brief POVMs for reading out the ancilla pointer states: projective,
 *        minimum-error (Helstrom) and unambiguous discrimination of two
 *        equiprobable qubit states.
 */

#pragma once

#include "qnd/qlinalg.hpp"
#include "qnd/states.hpp"

#include <algorithm>
#include <cmath>
#include <compare>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnd {

/// Outcome tag: an estimate index r in [0, d) or the inconclusive result.
struct Outcome {
  int index = 0;

  static constexpr Outcome inconclusive() { return Outcome{-1}; }
  constexpr bool conclusive() const { return index >= 0; }
  auto operator<=>(const Outcome&) const = default;
};

inline std::string to_string(Outcome o) {
  return o.conclusive() ? std::to_string(o.index) : std::string("inconclusive");
}

struct Povm {
  std::size_t dim = 0;
  std::vector<CMatrix> elements;
  std::vector<Outcome> labels;
  /// Set when the construction had no unique answer (e.g. identical states).
  bool degenerate = false;

  bool has_inconclusive() const {
    return std::any_of(labels.begin(), labels.end(), [](Outcome o) { return !o.conclusive(); });
  }
};

struct PovmReport {
  double min_eigenvalue = 0.0;          // smallest eigenvalue over all elements
  double completeness_residual = 0.0;   // max |sum_k Pi_k - I|
  bool valid = false;
  std::string problem;                  // empty when valid
};

inline PovmReport povm_validate(const Povm& p) {
  PovmReport rep;
  const auto n = static_cast<Eigen::Index>(p.dim);
  if (p.elements.empty() || p.elements.size() != p.labels.size()) {
    rep.problem = "element/label count mismatch or empty";
    rep.completeness_residual = INFINITY;
    return rep;
  }
  CMatrix sum = CMatrix::Zero(n, n);
  rep.min_eigenvalue = INFINITY;
  for (const auto& e : p.elements) {
    if (e.rows() != n || e.cols() != n) {
      rep.problem = "element shape mismatch";
      rep.completeness_residual = INFINITY;
      return rep;
    }
    if (!is_hermitian(e, TOL_PSD)) {
      rep.problem = "element not Hermitian";
      rep.min_eigenvalue = -INFINITY;
    } else {
      rep.min_eigenvalue = std::min(rep.min_eigenvalue, min_eigenvalue(0.5 * (e + e.adjoint())));
    }
    sum += e;
  }
  rep.completeness_residual = max_abs(sum - CMatrix::Identity(n, n));
  if (rep.problem.empty() && rep.min_eigenvalue < -TOL_PSD) rep.problem = "negative element";
  if (rep.problem.empty() && rep.completeness_residual > TOL_PSD) rep.problem = "incomplete";
  rep.valid = rep.problem.empty();
  return rep;
}

/// Projective measurement onto an orthonormal basis, outcome k for vector k.
inline Povm projective_povm(const std::vector<CVector>& basis) {
  if (basis.empty()) throw std::invalid_argument("projective_povm: empty basis");
  if (!is_unitary(columns(basis)))
    throw std::invalid_argument("projective_povm: basis is not orthonormal");
  Povm p;
  p.dim = basis.size();
  for (std::size_t k = 0; k < basis.size(); ++k) {
    p.elements.push_back(projector(basis[k]));
    p.labels.push_back(Outcome{static_cast<int>(k)});
  }
  return p;
}

/**
 * Minimum-error measurement for two equiprobable qubit states: projectors
 * onto the positive and negative eigenspaces of (|mu_0><mu_0| - |mu_1><mu_1|)/2.
 * Null directions go to outcome 0. Identical states (up to phase) yield
 * {I, 0} flagged as degenerate, with error rate 1/2.
 */
inline Povm helstrom_povm(const PureState& mu0, const PureState& mu1) {
  if (mu0.dim() != 2 || mu1.dim() != 2)
    throw UnsupportedError("helstrom_povm: analytic minimum-error readout is qubit-only");
  const CMatrix gamma = 0.5 * (mu0.projector() - mu1.projector());
  const auto eig = hermitian_eig(gamma);
  Povm p;
  p.dim = 2;
  CMatrix first = CMatrix::Zero(2, 2), second = CMatrix::Zero(2, 2);
  constexpr double kNull = 1e-13;
  for (Eigen::Index k = 0; k < 2; ++k) {
    const CMatrix proj = projector(eig.vectors.col(k));
    if (eig.values(k) < -kNull)
      second += proj;
    else
      first += proj;
  }
  p.elements = {first, second};
  p.labels = {Outcome{0}, Outcome{1}};
  p.degenerate = 1.0 - std::abs(mu0.inner(mu1)) < 1e-12;
  return p;
}

/// Minimum error rate (1 - sqrt(1 - |<mu_0|mu_1>|^2)) / 2 for equal priors.
inline double helstrom_error_rate(double overlap) {
  return 0.5 * (1.0 - std::sqrt(std::max(0.0, 1.0 - overlap)));
}

/// Unit vector orthogonal to a qubit state.
inline CVector qubit_orthogonal(const PureState& s) {
  CVector v(2);
  v << -std::conj(s[1]), std::conj(s[0]);
  return v;
}

/**
 * Optimal unambiguous discrimination of two equiprobable qubit states.
 *
 * Elements: Sigma_0 = |mu_1^perp><mu_1^perp| / (1 + |<mu_0|mu_1>|) (labels 0),
 * Sigma_1 likewise with mu_0^perp (label 1), and the inconclusive
 * remainder I - Sigma_0 - Sigma_1. The inconclusive probability is
 * |<mu_0|mu_1>| for either input.
 */
inline Povm unambiguous_povm(const PureState& mu0, const PureState& mu1) {
  if (mu0.dim() != 2 || mu1.dim() != 2)
    throw UnsupportedError("unambiguous_povm: qubit-only");
  const double s = std::abs(mu0.inner(mu1));
  if (s > 1.0 - 1e-12)
    throw std::invalid_argument("unambiguous_povm: states are linearly dependent");
  const CMatrix sigma0 = projector(qubit_orthogonal(mu1)) / (1.0 + s);
  const CMatrix sigma1 = projector(qubit_orthogonal(mu0)) / (1.0 + s);
  Povm p;
  p.dim = 2;
  p.elements = {sigma0, sigma1, CMatrix::Identity(2, 2) - sigma0 - sigma1};
  p.labels = {Outcome{0}, Outcome{1}, Outcome::inconclusive()};
  return p;
}

/// P_e = 1 - (1/d) sum_r <mu_r|Pi_r|mu_r>, summing every element labelled r.
inline double error_rate(const Povm& p, const std::vector<PureState>& pointers) {
  const std::size_t d = pointers.size();
  if (d == 0 || p.dim != pointers.front().dim())
    throw std::invalid_argument("error_rate: POVM and pointer dimensions differ");
  if (p.elements.size() != p.labels.size())
    throw std::invalid_argument("error_rate: element/label count mismatch");
  double success = 0.0;
  for (std::size_t k = 0; k < p.elements.size(); ++k) {
    const Outcome o = p.labels[k];
    if (!o.conclusive())
      throw std::invalid_argument("error_rate: POVM has an inconclusive outcome; use subensemble statistics");
    if (static_cast<std::size_t>(o.index) >= d)
      throw std::invalid_argument("error_rate: label " + std::to_string(o.index) + " has no pointer state");
    const CVector& mu = pointers[static_cast<std::size_t>(o.index)].amplitudes();
    success += mu.dot(p.elements[k] * mu).real();
  }
  return std::clamp(1.0 - success / static_cast<double>(d), 0.0, 1.0);
}

/**
 * Draws index k with probability probs[k]. Entries down to -TOL_PSD are
 * treated as zero; the total must be 1 within TOL_PSD and is renormalized.
 */
inline std::size_t sample_index(std::span<const double> probs, SeededRng& rng) {
  double total = 0.0;
  for (double q : probs) {
    if (!(q >= -TOL_PSD)) throw std::invalid_argument("sample_index: negative probability");
    total += std::max(q, 0.0);
  }
  if (std::abs(total - 1.0) > TOL_PSD)
    throw std::invalid_argument("sample_index: probabilities sum to " + std::to_string(total));
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    acc += probs[k];
    last = k;
    if (u < acc) return k;
  }
  return last;
}

/// Born-rule sample of the outcome of `p` on `state`.
inline Outcome sample_outcome(const Povm& p, const PureState& state, SeededRng& rng) {
  if (state.dim() != p.dim) throw std::invalid_argument("sample_outcome: dimension mismatch");
  if (p.elements.size() != p.labels.size() || p.elements.empty())
    throw std::invalid_argument("sample_outcome: malformed POVM");
  std::vector<double> probs;
  probs.reserve(p.elements.size());
  for (const auto& e : p.elements) probs.push_back(state.amplitudes().dot(e * state.amplitudes()).real());
  try {
    return p.labels[sample_index(probs, rng)];
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("sample_outcome: invalid POVM (") + e.what() + ")");
  }
}

}  // namespace qnd
