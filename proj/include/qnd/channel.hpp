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
 * @file channel.hpp
 * @brief The ancilla-controlled QND measurement, both as a closed-form Kraus
 *        channel and as an explicit circuit (coupling unitary, prepared
 *        ancilla, ancilla readout).
 *
 * The system S is always the slow tensor factor and the ancilla A the fast
 * one. Basis states and pointer states are indexed from 0.
 */

#pragma once

#include "qnd/qlinalg.hpp"
#include "qnd/states.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qnd {

/**
 * Ancilla state |tau> = alpha |mu> + beta |kappa>.
 *
 * |mu> is the state that realizes the perfect QND coupling and |kappa> the
 * state that switches the coupling off; <mu|kappa> = 1/sqrt(d) so that
 * alpha^2 + beta^2 + 2 alpha beta / sqrt(d) = 1 makes |tau> unit norm.
 */
struct AncillaPreparation {
  std::size_t dim;
  double alpha;
  double beta;
  PureState mu;
  PureState kappa;
  PureState tau;

  double normalization_residual() const {
    const double sd = std::sqrt(static_cast<double>(dim));
    return std::abs(alpha * alpha + beta * beta + 2.0 * alpha * beta / sd - 1.0);
  }
};

/// Nonnegative root beta of alpha^2 + beta^2 + 2 alpha beta / sqrt(d) = 1.
inline double ancilla_beta(std::size_t dim, double alpha) {
  if (dim < 2) throw std::invalid_argument("ancilla_beta: dimension must be >= 2");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("ancilla_beta: alpha must lie in [0, 1], got " +
                                std::to_string(alpha));
  const double d = static_cast<double>(dim);
  // Rationalized root: no cancellation as alpha -> 1.
  return (1.0 - alpha * alpha) / (alpha / std::sqrt(d) + std::sqrt(1.0 - alpha * alpha * (1.0 - 1.0 / d)));
}

/// Ancilla for the qudit CNOT realization: |mu> = |0>, |kappa> = uniform superposition.
inline AncillaPreparation make_ancilla(std::size_t dim, double alpha) {
  const double beta = ancilla_beta(dim, alpha);
  const auto n = static_cast<Eigen::Index>(dim);
  PureState mu = PureState::basis(dim, 0);
  PureState kappa(CVector::Constant(n, Complex(1.0 / std::sqrt(static_cast<double>(dim)))));
  CVector tau = alpha * mu.amplitudes() + beta * kappa.amplitudes();
  // Unit norm by construction; renormalize only the last-ulp drift.
  AncillaPreparation prep{dim, alpha, beta, mu, kappa, PureState::normalized(tau)};
  if (prep.normalization_residual() > TOL_NORM)
    throw std::logic_error("make_ancilla: normalization residual too large");
  return prep;
}

/// Deterministic operation rho -> sum_r A_r rho A_r^dagger.
class KrausChannel {
 public:
  /// Validates completeness within TOL_COMPLETE.
  KrausChannel(std::size_t dim, std::vector<CMatrix> kraus)
      : KrausChannel(dim, std::move(kraus), nullptr) {
    const double res = completeness_residual();
    if (res > TOL_COMPLETE)
      throw std::invalid_argument("KrausChannel: completeness residual " + std::to_string(res));
  }

  /// Skips the completeness check (fault-injection fixtures, diagnostics).
  static KrausChannel unchecked(std::size_t dim, std::vector<CMatrix> kraus) {
    return KrausChannel(dim, std::move(kraus), nullptr);
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ops_.size(); }
  const std::vector<CMatrix>& operators() const { return ops_; }
  const CMatrix& operator[](std::size_t r) const { return ops_[r]; }

  /// max |sum_r A_r^dagger A_r - I|
  double completeness_residual() const {
    const auto n = static_cast<Eigen::Index>(dim_);
    CMatrix s = CMatrix::Zero(n, n);
    for (const auto& a : ops_) s += a.adjoint() * a;
    return max_abs(s - CMatrix::Identity(n, n));
  }

  CMatrix apply(const CMatrix& rho) const {
    CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
    for (const auto& a : ops_) out += a * rho * a.adjoint();
    return out;
  }

  /// Natural (d^2 x d^2) representation: column i*d+j is the row-major
  /// vectorization of the image of the matrix unit |i><j|.
  CMatrix natural_matrix() const {
    const auto n = static_cast<Eigen::Index>(dim_);
    CMatrix out(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        CMatrix unit = CMatrix::Zero(n, n);
        unit(i, j) = 1.0;
        const CMatrix img = apply(unit);
        for (Eigen::Index k = 0; k < n; ++k)
          for (Eigen::Index l = 0; l < n; ++l) out(k * n + l, i * n + j) = img(k, l);
      }
    return out;
  }

  std::function<CMatrix(const CMatrix&)> as_map() const {
    return [ops = ops_](const CMatrix& rho) {
      CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
      for (const auto& a : ops) out += a * rho * a.adjoint();
      return out;
    };
  }

 private:
  KrausChannel(std::size_t dim, std::vector<CMatrix> kraus, std::nullptr_t)
      : dim_(dim), ops_(std::move(kraus)) {
    if (dim_ < 1) throw std::invalid_argument("KrausChannel: dimension must be positive");
    for (const auto& a : ops_)
      if (a.rows() != static_cast<Eigen::Index>(dim_) || a.cols() != a.rows())
        throw std::invalid_argument("KrausChannel: operator shape mismatch");
  }

  std::size_t dim_;
  std::vector<CMatrix> ops_;
};

/// Max element-wise distance between natural representations.
inline double process_distance(const KrausChannel& a, const KrausChannel& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("process_distance: dim mismatch");
  return max_abs(a.natural_matrix() - b.natural_matrix());
}

/// Largest deviation of the channel from fixing each |a_i><a_i|.
inline double qnd_fixed_point_residual(const KrausChannel& ch, const std::vector<CVector>& basis) {
  double worst = 0.0;
  for (const auto& a : basis) {
    const CMatrix p = projector(a);
    worst = std::max(worst, max_abs(ch.apply(p) - p));
  }
  return worst;
}

/// Diagonal Kraus operators (A_r)_ii = alpha delta_ir + beta / sqrt(d).
inline KrausChannel kraus_qnd(const AncillaPreparation& prep) {
  const auto n = static_cast<Eigen::Index>(prep.dim);
  const double off = prep.beta / std::sqrt(static_cast<double>(prep.dim));
  std::vector<CMatrix> ops;
  ops.reserve(prep.dim);
  for (Eigen::Index r = 0; r < n; ++r) {
    CMatrix a = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) a(i, i) = (i == r ? prep.alpha : 0.0) + off;
    ops.push_back(std::move(a));
  }
  return KrausChannel(prep.dim, std::move(ops));
}

/// |i>_S |j>_A -> |i>_S |i + j mod d>_A
inline CMatrix cnot_qudit(std::size_t dim) {
  if (dim < 2) throw std::invalid_argument("cnot_qudit: dimension must be >= 2");
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix u = CMatrix::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) u(i * n + (i + j) % n, i * n + j) = 1.0;
  return u;
}

/**
 * A (possibly imperfect) QND coupling |a_i>|mu> -> |a_i>|mu_i>.
 *
 * Pointer states need not be orthogonal. For d = 2 the phase of the pointer
 * overlap, phi = arg<mu_0|mu_1>, decides whether the induced operation sits on
 * the trade-off boundary.
 */
class QndSpec {
 public:
  QndSpec(std::vector<CVector> system_basis, std::vector<PureState> pointers, PureState fiducial)
      : basis_(std::move(system_basis)), pointers_(std::move(pointers)), fiducial_(std::move(fiducial)) {
    const std::size_t d = basis_.size();
    if (d < 2) throw std::invalid_argument("QndSpec: dimension must be >= 2");
    if (pointers_.size() != d)
      throw std::invalid_argument("QndSpec: need one pointer state per basis state");
    if (fiducial_.dim() != d) throw std::invalid_argument("QndSpec: fiducial dimension mismatch");
    for (const auto& p : pointers_)
      if (p.dim() != d) throw std::invalid_argument("QndSpec: pointer dimension mismatch");
    for (const auto& a : basis_)
      if (static_cast<std::size_t>(a.size()) != d)
        throw std::invalid_argument("QndSpec: basis vector dimension mismatch");
    const CMatrix b = columns(basis_);
    if (!is_unitary(b)) throw std::invalid_argument("QndSpec: system basis is not orthonormal");
  }

  /// Computational system basis, fiducial |0>.
  static QndSpec with_pointers(std::vector<PureState> pointers) {
    const std::size_t d = pointers.size();
    std::vector<CVector> basis;
    for (std::size_t i = 0; i < d; ++i) basis.push_back(basis_vector(d, i));
    return QndSpec(std::move(basis), std::move(pointers), PureState::basis(d, 0));
  }

  /// Qubit pointers |mu_0> = |0>, |mu_1> = sqrt(O) e^{i phi}|0> + sqrt(1-O)|1>,
  /// so |<mu_0|mu_1>|^2 = O and arg<mu_0|mu_1> = phi.
  static QndSpec qubit(double overlap, double phi) {
    if (!(overlap >= 0.0 && overlap <= 1.0))
      throw std::invalid_argument("QndSpec::qubit: overlap must lie in [0, 1]");
    CVector m1(2);
    m1 << std::sqrt(overlap) * std::polar(1.0, phi), std::sqrt(1.0 - overlap);
    return with_pointers({PureState::basis(2, 0), PureState::normalized(m1)});
  }

  std::size_t dim() const { return basis_.size(); }
  const std::vector<CVector>& system_basis() const { return basis_; }
  const std::vector<PureState>& pointers() const { return pointers_; }
  const PureState& fiducial() const { return fiducial_; }

  /// gram(i, j) = <mu_i|mu_j>
  CMatrix gram() const {
    const auto n = static_cast<Eigen::Index>(dim());
    CMatrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        g(i, j) = pointers_[static_cast<std::size_t>(i)].inner(pointers_[static_cast<std::size_t>(j)]);
    return g;
  }

  /// arg<mu_0|mu_1>; qubits only.
  double phase() const {
    if (dim() != 2) throw UnsupportedError("QndSpec::phase: defined for d = 2 only");
    return std::arg(pointers_[0].inner(pointers_[1]));
  }

  /// |<mu_0|mu_1>|^2; qubits only.
  double overlap() const {
    if (dim() != 2) throw UnsupportedError("QndSpec::overlap: defined for d = 2 only");
    return std::norm(pointers_[0].inner(pointers_[1]));
  }

 private:
  std::vector<CVector> basis_;
  std::vector<PureState> pointers_;
  PureState fiducial_;
};

/// U = sum_i |a_i><a_i| (x) V_i with V_i |mu> = |mu_i>.
inline CMatrix qnd_unitary(const QndSpec& spec) {
  const auto n = static_cast<Eigen::Index>(spec.dim());
  CMatrix u = CMatrix::Zero(n * n, n * n);
  for (std::size_t i = 0; i < spec.dim(); ++i) {
    const CMatrix v = unitary_with_column(spec.pointers()[i].amplitudes(), spec.fiducial().amplitudes());
    u += tensor(projector(spec.system_basis()[i]), v);
  }
  return u;
}

/// K_r = (I (x) <e_r|) U (I (x) |tau>) for an orthonormal ancilla readout {|e_r>}.
inline KrausChannel channel_from_circuit(const CMatrix& coupling, const PureState& tau,
                                         const std::vector<CVector>& readout_basis) {
  const std::size_t da = tau.dim();
  if (coupling.rows() != coupling.cols() || coupling.rows() % static_cast<Eigen::Index>(da) != 0)
    throw std::invalid_argument("channel_from_circuit: coupling size does not match ancilla");
  if (!is_unitary(coupling)) throw std::invalid_argument("channel_from_circuit: coupling is not unitary");
  if (readout_basis.size() != da)
    throw std::invalid_argument("channel_from_circuit: readout basis must have one vector per ancilla level");
  if (!is_unitary(columns(readout_basis)))
    throw std::invalid_argument("channel_from_circuit: readout basis is not orthonormal");

  const auto ds = static_cast<std::size_t>(coupling.rows()) / da;
  const CMatrix id = CMatrix::Identity(static_cast<Eigen::Index>(ds), static_cast<Eigen::Index>(ds));
  const CMatrix prepare = tensor(id, CMatrix(tau.amplitudes()));
  std::vector<CMatrix> ops;
  ops.reserve(da);
  for (const auto& e : readout_basis) ops.push_back(tensor(id, CMatrix(e.adjoint())) * coupling * prepare);
  return KrausChannel(ds, std::move(ops));
}

inline std::vector<CVector> computational_basis(std::size_t dim) {
  std::vector<CVector> b;
  for (std::size_t i = 0; i < dim; ++i) b.push_back(basis_vector(dim, i));
  return b;
}

/// diag(1, e^{-i phi}) in the {|a_i>} basis, phi = arg<mu_0|mu_1>.
inline CMatrix phase_correction(const QndSpec& spec) {
  if (spec.dim() != 2) throw UnsupportedError("phase_correction: defined for d = 2 only");
  const double phi = spec.phase();
  return projector(spec.system_basis()[0]) + std::polar(1.0, -phi) * projector(spec.system_basis()[1]);
}

using ChannelMap = std::function<CMatrix(const CMatrix&)>;

/// rho -> T^dagger Lambda(T rho T^dagger) T
inline ChannelMap twirl_wrap(ChannelMap channel, const CMatrix& twirl) {
  if (!is_unitary(twirl)) throw std::invalid_argument("twirl_wrap: twirl is not unitary");
  return [channel = std::move(channel), t = CMatrix(twirl)](const CMatrix& rho) -> CMatrix {
    return t.adjoint() * channel(t * rho * t.adjoint()) * t;
  };
}

}  // namespace qnd
