// Copyright 2026 The qmarkov Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "qmarkov/errors.hpp"
#include "qmarkov/linalg.hpp"
#include "qmarkov/tolerances.hpp"

namespace qmarkov {

/// An element of B(H): a dim x dim complex matrix.
using Operator = Eigen::MatrixXcd;

/// Throws PreconditionError unless x is a non-empty square matrix of finite
/// entries. `what` names the offending argument in the message.
inline void validate_operator(const Operator& x, const std::string& what = "operator") {
  detail::require(x.rows() > 0 && x.rows() == x.cols(),
                  what + ": expected a non-empty square matrix, got " + std::to_string(x.rows()) + "x" +
                      std::to_string(x.cols()));
  detail::require(x.allFinite(), what + ": entries must be finite");
}

inline void require_same_dim(const Operator& a, const Operator& b, const std::string& what) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(),
                  what + ": dimension mismatch (" + std::to_string(a.rows()) + " vs " + std::to_string(b.rows()) +
                      ")");
}

inline Operator identity(Eigen::Index dim) { return Operator::Identity(dim, dim); }

/// |i><j| in a dim-dimensional space.
inline Operator matrix_unit(Eigen::Index dim, Eigen::Index i, Eigen::Index j) {
  Operator e = Operator::Zero(dim, dim);
  e(i, j) = 1.0;
  return e;
}

inline Operator pauli_x() {
  Operator m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Operator pauli_y() {
  Operator m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

inline Operator pauli_z() {
  Operator m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// Tr(A^dagger B).
inline Complex hs_inner(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "hs_inner");
  return (a.conjugate().cwiseProduct(b)).sum();
}

inline double hs_norm(const Operator& a) { return a.norm(); }

inline Operator hermitian_part(const Operator& x) { return 0.5 * (x + x.adjoint()); }

// ---------------------------------------------------------------------------
// Vectorization.  Column stacking: vec(X)[i + j*dim] = X(i, j), so that
// vec(A X B) = (B^T kron A) vec(X).

inline Vector vectorize(const Operator& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

inline Operator devectorize(const Vector& v, Eigen::Index dim) {
  detail::require(dim > 0 && dim * dim == v.size(),
                  "devectorize: vector length " + std::to_string(v.size()) + " is not dim^2 for dim " +
                      std::to_string(dim));
  return Eigen::Map<const Operator>(v.data(), dim, dim);
}

/// Recovers dim from a vector of length dim^2.
inline Operator devectorize(const Vector& v) {
  const auto dim = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  detail::require(dim * dim == v.size() && dim > 0,
                  "devectorize: vector length " + std::to_string(v.size()) + " is not a perfect square");
  return devectorize(v, dim);
}

// ---------------------------------------------------------------------------
// Positivity.

struct HermitianReport {
  bool is_hermitian = false;
  double min_eigenvalue = 0.0;
  bool is_positive_semidefinite = false;
  bool is_strictly_positive = false;
  double tolerance_used = 0.0;
};

/// Eigenvalue-based positivity flags. The eigenvalues are those of the
/// Hermitian part; inputs with max|X - X^dagger| > tol are reported as
/// non-Hermitian and every positivity flag is cleared.
inline HermitianReport positivity_report(const Operator& x, double tol = Tolerances{}.positivity) {
  validate_operator(x, "positivity_report");
  HermitianReport report;
  report.tolerance_used = tol;
  report.is_hermitian = (x - x.adjoint()).cwiseAbs().maxCoeff() <= tol;
  const Eigen::SelfAdjointEigenSolver<Operator> eig(hermitian_part(x), Eigen::EigenvaluesOnly);
  report.min_eigenvalue = eig.eigenvalues().minCoeff();
  if (report.is_hermitian) {
    report.is_positive_semidefinite = report.min_eigenvalue >= -tol;
    report.is_strictly_positive = report.min_eigenvalue > tol;
  }
  return report;
}

/// rho^{-1} for a strictly positive rho, through its eigendecomposition.
inline Operator inverse_strictly_positive(const Operator& rho, double tol = Tolerances{}.positivity) {
  const HermitianReport report = positivity_report(rho, tol);
  detail::require(report.is_strictly_positive, "rho is not strictly positive (min eigenvalue " +
                                                   std::to_string(report.min_eigenvalue) + ")");
  const Eigen::SelfAdjointEigenSolver<Operator> eig(hermitian_part(rho));
  const Eigen::VectorXd inv = eig.eigenvalues().cwiseInverse();
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().adjoint();
}

// ---------------------------------------------------------------------------
// rho-weighted geometry: <A, B>_rho = Tr(A^dagger B rho^{-1}).

inline Complex rho_inner_with_inverse(const Operator& a, const Operator& b, const Operator& rho_inv) {
  return hs_inner(a, b * rho_inv);
}

inline Complex rho_inner(const Operator& a, const Operator& b, const Operator& rho,
                         double tol = Tolerances{}.positivity) {
  require_same_dim(a, b, "rho_inner");
  require_same_dim(a, rho, "rho_inner");
  return rho_inner_with_inverse(a, b, inverse_strictly_positive(rho, tol));
}

inline double rho_norm_with_inverse(const Operator& a, const Operator& rho_inv) {
  return std::sqrt(std::max(0.0, rho_inner_with_inverse(a, a, rho_inv).real()));
}

/// Modified Gram-Schmidt (with one reorthogonalization pass) under the
/// rho-inner product. An input whose remainder has rho-norm at or below
/// tol.rank times its own rho-norm is dropped.
inline std::vector<Operator> rho_orthonormalize(std::span<const Operator> vs, const Operator& rho,
                                                const Tolerances& tol = {}) {
  const Operator rho_inv = inverse_strictly_positive(rho, tol.positivity);
  std::vector<Operator> out;
  for (const Operator& v : vs) {
    require_same_dim(v, rho, "rho_orthonormalize");
    const double original = rho_norm_with_inverse(v, rho_inv);
    if (original == 0.0) continue;
    Operator w = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const Operator& q : out) w -= rho_inner_with_inverse(q, w, rho_inv) * q;
    const double remaining = rho_norm_with_inverse(w, rho_inv);
    if (remaining <= tol.rank * original) continue;
    out.push_back(w / remaining);
  }
  return out;
}

}  // namespace qmarkov
