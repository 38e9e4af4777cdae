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
 * @file qlinalg.hpp
 * @brief Small dense complex linear algebra: Kronecker products, partial
 *        traces, Hermitian eigendecomposition and unitary completion.
 *
 * Bipartite index convention is system-major: for a product space
 * H_S (x) H_A the joint index is i_S * d_A + i_A.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnd {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double TOL_UNITARY = 1e-10;
inline constexpr double TOL_HERM = 1e-12;
inline constexpr double TOL_NORM = 1e-12;
inline constexpr double TOL_TRACE = 1e-10;
inline constexpr double TOL_PSD = 1e-10;
inline constexpr double TOL_COMPLETE = 1e-12;
inline constexpr double TOL_GS_SKIP = 1e-8;

/// Thrown when an operation is asked for a configuration it does not support
/// (as opposed to malformed input, which is std::invalid_argument).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Largest absolute entry; 0 for empty matrices.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

inline double hermiticity_residual(const CMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  return max_abs(m - m.adjoint());
}

inline double unitarity_residual(const CMatrix& u) {
  if (u.rows() != u.cols()) return INFINITY;
  return max_abs(u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols()));
}

inline bool is_hermitian(const CMatrix& m, double tol = TOL_HERM) {
  return hermiticity_residual(m) <= tol;
}

inline bool is_unitary(const CMatrix& u, double tol = TOL_UNITARY) {
  return unitarity_residual(u) <= tol;
}

inline bool is_normalized(const CVector& v, double tol = TOL_NORM) {
  return std::abs(v.norm() - 1.0) <= tol;
}

inline CVector basis_vector(std::size_t n, std::size_t k) {
  if (k >= n) throw std::out_of_range("basis_vector: index out of range");
  CVector e = CVector::Zero(static_cast<Eigen::Index>(n));
  e(static_cast<Eigen::Index>(k)) = 1.0;
  return e;
}

/// Kronecker product a (x) b; a is the slow (left) factor.
inline CMatrix tensor(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CVector tensor(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

enum class Subsystem { A, B };

/// Traces out subsystem `over` of an operator on H_A (x) H_B, keeping the other.
inline CMatrix partial_trace(const CMatrix& rho, std::size_t dim_a, std::size_t dim_b,
                             Subsystem over) {
  const auto da = static_cast<Eigen::Index>(dim_a);
  const auto db = static_cast<Eigen::Index>(dim_b);
  if (da == 0 || db == 0 || rho.rows() != da * db || rho.cols() != da * db)
    throw std::invalid_argument("partial_trace: operator size " +
                                std::to_string(rho.rows()) + "x" +
                                std::to_string(rho.cols()) + " does not factor as " +
                                std::to_string(dim_a) + "*" + std::to_string(dim_b));
  if (!is_hermitian(rho))
    throw std::invalid_argument("partial_trace: operator is not Hermitian");

  if (over == Subsystem::B) {
    CMatrix out = CMatrix::Zero(da, da);
    for (Eigen::Index i = 0; i < da; ++i)
      for (Eigen::Index j = 0; j < da; ++j)
        for (Eigen::Index k = 0; k < db; ++k) out(i, j) += rho(i * db + k, j * db + k);
    return out;
  }
  CMatrix out = CMatrix::Zero(db, db);
  for (Eigen::Index i = 0; i < db; ++i)
    for (Eigen::Index j = 0; j < db; ++j)
      for (Eigen::Index k = 0; k < da; ++k) out(i, j) += rho(k * db + i, k * db + j);
  return out;
}

struct EigenDecomposition {
  RVector values;   // ascending
  CMatrix vectors;  // column k pairs with values(k)
};

inline EigenDecomposition hermitian_eig(const CMatrix& m) {
  if (!is_hermitian(m))
    throw std::invalid_argument("hermitian_eig: matrix is not Hermitian (residual " +
                                std::to_string(hermiticity_residual(m)) + ")");
  // Symmetrize so that round-off in the strict lower triangle is not ignored.
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eig: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double min_eigenvalue(const CMatrix& m) {
  return hermitian_eig(m).values.minCoeff();
}

/// Orthonormal basis whose first column is `first` (normalized); remaining
/// columns come from Gram-Schmidt over the canonical basis in index order,
/// skipping candidates whose residual norm falls below TOL_GS_SKIP.
inline CMatrix complete_basis(const CVector& first) {
  const Eigen::Index n = first.size();
  CMatrix q(n, n);
  q.col(0) = first;
  Eigen::Index filled = 1;
  for (Eigen::Index k = 0; k < n && filled < n; ++k) {
    CVector v = CVector::Zero(n);
    v(k) = 1.0;
    // Two passes keep the completion orthonormal to ~1e-15.
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index c = 0; c < filled; ++c) v -= q.col(c).dot(v) * q.col(c);
    const double nv = v.norm();
    if (nv < TOL_GS_SKIP) continue;
    q.col(filled++) = v / nv;
  }
  if (filled != n) throw std::runtime_error("complete_basis: completion failed");
  return q;
}

/// Unitary V with V * source = target.
inline CMatrix unitary_with_column(const CVector& target, const CVector& source) {
  if (target.size() != source.size())
    throw std::invalid_argument("unitary_with_column: length mismatch");
  if (!is_normalized(target) || !is_normalized(source))
    throw std::invalid_argument("unitary_with_column: inputs must be normalized");
  return complete_basis(target) * complete_basis(source).adjoint();
}

/// Gram-Schmidt orthonormalization of `vectors` in order; throws if they are
/// linearly dependent.
inline std::vector<CVector> orthonormalize(const std::vector<CVector>& vectors) {
  std::vector<CVector> out;
  out.reserve(vectors.size());
  for (const auto& v0 : vectors) {
    CVector v = v0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : out) v -= q.dot(v) * q;
    const double nv = v.norm();
    if (nv < TOL_GS_SKIP)
      throw std::invalid_argument("orthonormalize: vectors are linearly dependent");
    out.push_back(v / nv);
  }
  return out;
}

inline CMatrix projector(const CVector& v) { return v * v.adjoint(); }

/// Matrix whose columns are the given vectors.
inline CMatrix columns(const std::vector<CVector>& vs) {
  if (vs.empty()) return {};
  CMatrix m(vs.front().size(), static_cast<Eigen::Index>(vs.size()));
  for (std::size_t k = 0; k < vs.size(); ++k) {
    if (vs[k].size() != m.rows()) throw std::invalid_argument("columns: ragged input");
    m.col(static_cast<Eigen::Index>(k)) = vs[k];
  }
  return m;
}

}  // namespace qnd
