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
 * @file states.hpp
 * @brief Pure and mixed state types, reproducible random streams, Haar
 *        sampling and the pure-state fidelity <psi|rho|psi>.
 */

#pragma once

#include "qnd/qlinalg.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace qnd {

/**
 * Deterministic random stream identified by (master_seed, stream_id).
 *
 * Monte Carlo code derives one stream per sample index so results do not
 * depend on how samples are distributed over workers. The engine is
 * std::mt19937_64 (fully specified by the standard) seeded with a splitmix64
 * mix of both ids. Uniforms take the top 53 bits; Gaussians use the Marsaglia
 * polar method, caching the second variate.
 */
class SeededRng {
 public:
  SeededRng(std::uint64_t master_seed, std::uint64_t stream_id)
      : master_seed_(master_seed),
        stream_id_(stream_id),
        engine_(mix(master_seed, stream_id)) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Independent child stream; used for nested experiments.
  SeededRng substream(std::uint64_t child) const {
    return SeededRng(mix(master_seed_, stream_id_), child);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal variate.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (b + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

class PureState {
 public:
  /// Takes amplitudes that are already unit norm (within TOL_NORM).
  explicit PureState(CVector amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() < 1) throw std::invalid_argument("PureState: empty amplitude vector");
    if (!amps_.allFinite()) throw std::invalid_argument("PureState: non-finite amplitude");
    if (!is_normalized(amps_))
      throw std::invalid_argument("PureState: norm " + std::to_string(amps_.norm()) +
                                  " differs from 1");
  }

  static PureState normalized(const CVector& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n))
      throw std::invalid_argument("PureState::normalized: zero or non-finite vector");
    return PureState(v / n);
  }

  static PureState basis(std::size_t dim, std::size_t k) {
    return PureState(basis_vector(dim, k));
  }

  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const CVector& amplitudes() const { return amps_; }
  Complex operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

  /// <this|other>
  Complex inner(const PureState& other) const {
    if (other.dim() != dim()) throw std::invalid_argument("PureState::inner: dim mismatch");
    return amps_.dot(other.amps_);
  }

  CMatrix projector() const { return amps_ * amps_.adjoint(); }

 private:
  CVector amps_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1)
      throw std::invalid_argument("DensityMatrix: matrix must be square and non-empty");
    if (!is_hermitian(m_))
      throw std::invalid_argument("DensityMatrix: not Hermitian (residual " +
                                  std::to_string(hermiticity_residual(m_)) + ")");
    const double tr = m_.trace().real();
    if (std::abs(tr - 1.0) > TOL_TRACE)
      throw std::invalid_argument("DensityMatrix: trace " + std::to_string(tr) + " != 1");
    const double lo = min_eigenvalue(m_);
    if (lo < -TOL_PSD)
      throw std::invalid_argument("DensityMatrix: negative eigenvalue " + std::to_string(lo));
  }

  static DensityMatrix from_pure(const PureState& psi) { return DensityMatrix(psi.projector()); }

  static DensityMatrix maximally_mixed(std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    return DensityMatrix(CMatrix::Identity(n, n) / static_cast<double>(dim));
  }

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }

 private:
  CMatrix m_;
};

/// Haar-random pure state: 2d independent standard normals as real and
/// imaginary parts (component order re_0, im_0, re_1, ...), then normalized.
inline PureState haar_state(std::size_t dim, SeededRng& rng) {
  if (dim < 2) throw std::invalid_argument("haar_state: dimension must be >= 2");
  CVector z(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double re = rng.gaussian();
    const double im = rng.gaussian();
    z(i) = Complex(re, im);
  }
  return PureState::normalized(z);
}

/// Haar-random unitary from the QR decomposition of a complex Ginibre matrix
/// (filled row-major), with the phases of diag(R) absorbed into Q.
inline CMatrix haar_unitary(std::size_t dim, SeededRng& rng) {
  if (dim < 2) throw std::invalid_argument("haar_unitary: dimension must be >= 2");
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix z(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = rng.gaussian();
      const double im = rng.gaussian();
      z(i, j) = Complex(re, im) / std::sqrt(2.0);
    }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex rkk = r(k, k);
    const double a = std::abs(rkk);
    if (a > 0.0) q.col(k) *= rkk / a;
  }
  return q;
}

/// <psi|rho|psi>, clamped to [0, 1].
inline double fidelity(const PureState& psi, const DensityMatrix& rho) {
  if (psi.dim() != rho.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  const Complex f = psi.amplitudes().dot(rho.matrix() * psi.amplitudes());
  return std::clamp(f.real(), 0.0, 1.0);
}

/// |<phi|psi>|^2
inline double fidelity(const PureState& psi, const PureState& phi) {
  return std::clamp(std::norm(psi.inner(phi)), 0.0, 1.0);
}

}  // namespace qnd
