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

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace qmarkov {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace linalg {

/// Kronecker product, standard ordering: (A kron B)(i*p + k, j*q + l) = A(i,j) B(k,l).
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Singular values at or below rank_tol * max(1, largest) are treated as zero.
/// The floor of one keeps an exactly vanishing operator (largest singular
/// value at roundoff level) from being declared full rank.
inline double rank_threshold(const Eigen::VectorXd& singular_values, double rank_tol) {
  const double largest = singular_values.size() > 0 ? singular_values(0) : 0.0;
  return rank_tol * std::max(1.0, largest);
}

inline Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> svd_full(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner>(
      m, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

inline Eigen::Index numerical_rank(const Matrix& m, double rank_tol) {
  if (m.size() == 0) return 0;
  const Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double threshold = rank_threshold(s, rank_tol);
  return static_cast<Eigen::Index>((s.array() > threshold).count());
}

/// Orthonormal basis (as columns) of the right null space of m.
inline Matrix null_space(const Matrix& m, double rank_tol) {
  if (m.rows() == 0) return Matrix::Identity(m.cols(), m.cols());
  const auto svd = svd_full(m);
  const auto& s = svd.singularValues();
  const double threshold = rank_threshold(s, rank_tol);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > threshold) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

/// The count right singular vectors of m belonging to its smallest singular
/// values, together with the largest of those singular values.
inline std::pair<Matrix, double> smallest_right_singular_vectors(const Matrix& m, Eigen::Index count) {
  const auto svd = svd_full(m);
  const auto& s = svd.singularValues();
  const Eigen::Index n = m.cols();
  // Columns beyond min(rows, cols) have singular value exactly zero.
  const Eigen::Index start = n - count;
  const double worst = start < s.size() ? s(start) : 0.0;
  return {svd.matrixV().rightCols(count), worst};
}

/// Orthonormal basis (as columns) of the column space of m.
inline Matrix column_space(const Matrix& m, double rank_tol) {
  if (m.size() == 0) return Matrix(m.rows(), 0);
  const auto svd = svd_full(m);
  const auto& s = svd.singularValues();
  const double threshold = rank_threshold(s, rank_tol);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > threshold) ++rank;
  return svd.matrixU().leftCols(rank);
}

/// Scales v so that its largest-modulus entry is real and positive. Among
/// entries of near-equal modulus the lowest index wins.
inline void fix_phase(Eigen::Ref<Vector> v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs * (1.0 + 1e-9) + 1e-14) {
      best = i;
      best_abs = a;
    }
  }
  if (best_abs > 0.0) v *= std::conj(v(best)) / best_abs;
}

/// Deterministic orthonormal basis for the column span of `basis` (assumed to
/// have full column rank): reduced row echelon form with lowest-index pivots
/// among near-ties, then Gram-Schmidt in pivot order and phase fixing. The
/// result depends only on the subspace, not on the particular input basis.
inline Matrix canonical_basis(const Matrix& basis) {
  const Eigen::Index n = basis.rows();
  const Eigen::Index d = basis.cols();
  if (d == 0) return basis;
  // Work on the transpose: rows of `t` are basis vectors.
  Matrix t = basis.transpose();
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Eigen::Index r = 0; r < d; ++r) {
    double best_abs = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      for (Eigen::Index rr = r; rr < d; ++rr) best_abs = std::max(best_abs, std::abs(t(rr, c)));
    }
    Eigen::Index pivot_col = -1;
    Eigen::Index pivot_row = -1;
    for (Eigen::Index c = 0; c < n && pivot_col < 0; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      for (Eigen::Index rr = r; rr < d; ++rr) {
        if (std::abs(t(rr, c)) >= (1.0 - 1e-6) * best_abs) {
          pivot_col = c;
          pivot_row = rr;
          break;
        }
      }
    }
    used[static_cast<std::size_t>(pivot_col)] = true;
    t.row(r).swap(t.row(pivot_row));
    t.row(r) /= t(r, pivot_col);
    for (Eigen::Index rr = 0; rr < d; ++rr)
      if (rr != r) t.row(rr) -= t(rr, pivot_col) * t.row(r);
  }
  Matrix q = t.transpose();
  for (Eigen::Index j = 0; j < d; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    q.col(j).normalize();
    fix_phase(q.col(j));
  }
  return q;
}

}  // namespace linalg
}  // namespace qmarkov
