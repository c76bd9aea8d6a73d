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

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qmarkov/errors.hpp"
#include "qmarkov/linalg.hpp"
#include "qmarkov/operator_space.hpp"
#include "qmarkov/tolerances.hpp"

namespace qmarkov {

/// Matrix of a linear map on B(H) acting on column-stacked operators.
class Superoperator {
 public:
  Superoperator(Eigen::Index dim, Matrix matrix) : dim_(dim), matrix_(std::move(matrix)) { validate(); }

  /// Infers dim from a square matrix of side dim^2.
  explicit Superoperator(Matrix matrix) : dim_(side_root(matrix.rows())), matrix_(std::move(matrix)) { validate(); }

  Eigen::Index dim() const { return dim_; }
  const Matrix& matrix() const { return matrix_; }

  Operator apply(const Operator& x) const {
    detail::require(x.rows() == dim_ && x.cols() == dim_, "superoperator apply: dimension mismatch");
    return devectorize(matrix_ * vectorize(x), dim_);
  }

  /// Adjoint with respect to the Hilbert-Schmidt product.
  Superoperator adjoint() const { return Superoperator(dim_, matrix_.adjoint()); }

 private:
  static Eigen::Index side_root(Eigen::Index side) {
    return static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(side))));
  }

  void validate() const {
    detail::require(dim_ > 0, "superoperator: dim must be positive");
    detail::require(matrix_.rows() == dim_ * dim_ && matrix_.cols() == dim_ * dim_,
                    "superoperator: matrix side must be dim^2 = " + std::to_string(dim_ * dim_) + ", got " +
                        std::to_string(matrix_.rows()) + "x" + std::to_string(matrix_.cols()));
    detail::require(matrix_.allFinite(), "superoperator: entries must be finite");
  }

  Eigen::Index dim_;
  Matrix matrix_;
};

/// A completely positive map X -> sum_j A_j X A_j^dagger given by its Kraus
/// operators. Trace non-increase is not enforced at construction (see
/// classify()). Copies share the lazily built superoperator.
class KrausMap {
 public:
  explicit KrausMap(std::vector<Operator> kraus) : kraus_(std::move(kraus)), cache_(std::make_shared<Cache>()) {
    detail::require(!kraus_.empty(), "kraus: list must be non-empty");
    for (std::size_t j = 0; j < kraus_.size(); ++j) {
      validate_operator(kraus_[j], "kraus[" + std::to_string(j) + "]");
      detail::require(kraus_[j].rows() == kraus_[0].rows(),
                      "kraus[" + std::to_string(j) + "]: dimension " + std::to_string(kraus_[j].rows()) +
                          " differs from kraus[0] dimension " + std::to_string(kraus_[0].rows()));
    }
  }

  Eigen::Index dim() const { return kraus_.front().rows(); }
  std::span<const Operator> kraus() const { return kraus_; }
  std::size_t size() const { return kraus_.size(); }

  Operator apply(const Operator& x) const {
    require_dim(x, "apply");
    Operator out = Operator::Zero(dim(), dim());
    for (const Operator& a : kraus_) out.noalias() += a * x * a.adjoint();
    return out;
  }

  /// P^dagger(X) = sum_j A_j^dagger X A_j.
  Operator adjoint_apply(const Operator& x) const {
    require_dim(x, "adjoint_apply");
    Operator out = Operator::Zero(dim(), dim());
    for (const Operator& a : kraus_) out.noalias() += a.adjoint() * x * a;
    return out;
  }

  /// The map with Kraus operators A_j^dagger.
  KrausMap adjoint() const {
    std::vector<Operator> adj;
    adj.reserve(kraus_.size());
    for (const Operator& a : kraus_) adj.push_back(a.adjoint());
    return KrausMap(std::move(adj));
  }

  /// sum_j conj(A_j) kron A_j, built once per map.
  const Superoperator& superoperator() const {
    std::call_once(cache_->once, [this] {
      const Eigen::Index n = dim();
      Matrix s = Matrix::Zero(n * n, n * n);
      for (const Operator& a : kraus_) s += linalg::kron(a.conjugate(), a);
      cache_->superop = std::make_unique<Superoperator>(n, std::move(s));
    });
    return *cache_->superop;
  }

 private:
  struct Cache {
    std::once_flag once;
    std::unique_ptr<Superoperator> superop;
  };

  void require_dim(const Operator& x, const char* what) const {
    detail::require(x.rows() == dim() && x.cols() == dim(),
                    std::string(what) + ": operator dimension " + std::to_string(x.rows()) +
                        " does not match map dimension " + std::to_string(dim()));
  }

  std::vector<Operator> kraus_;
  std::shared_ptr<Cache> cache_;
};

inline Operator apply(const KrausMap& map, const Operator& x) { return map.apply(x); }
inline Operator adjoint_apply(const KrausMap& map, const Operator& x) { return map.adjoint_apply(x); }
inline Superoperator superoperator_matrix(const KrausMap& map) { return map.superoperator(); }

/// n-fold application through repeated superoperator-vector products.
inline Operator iterate(const KrausMap& map, const Operator& x, long long n) {
  detail::require(n >= 0, "iterate: n must be nonnegative");
  detail::require(x.rows() == map.dim() && x.cols() == map.dim(), "iterate: dimension mismatch");
  const Matrix& s = map.superoperator().matrix();
  Vector v = vectorize(x);
  Vector next(v.size());
  for (long long k = 0; k < n; ++k) {
    next.noalias() = s * v;
    v.swap(next);
  }
  return devectorize(v, map.dim());
}

// ---------------------------------------------------------------------------
// Classification.

struct ChannelClassification {
  bool trace_preserving = false;
  bool trace_nonincreasing = false;
  bool unital = false;
  bool subunital = false;
  double tolerance_used = 0.0;
};

namespace detail {

// Spectrum bounds of I - y for Hermitian y.
inline std::pair<double, double> deficit_range(const Operator& y) {
  const Operator diff = identity(y.rows()) - hermitian_part(y);
  const Eigen::SelfAdjointEigenSolver<Operator> eig(diff, Eigen::EigenvaluesOnly);
  return {eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff()};
}

}  // namespace detail

/// Operator-order tests of P^dagger(I) and P(I) against I.
inline ChannelClassification classify(const KrausMap& map, double tol = Tolerances{}.positivity) {
  const Eigen::Index n = map.dim();
  Operator adj_identity = Operator::Zero(n, n);
  Operator image_identity = Operator::Zero(n, n);
  for (const Operator& a : map.kraus()) {
    adj_identity.noalias() += a.adjoint() * a;
    image_identity.noalias() += a * a.adjoint();
  }
  const auto [tp_lo, tp_hi] = detail::deficit_range(adj_identity);
  const auto [u_lo, u_hi] = detail::deficit_range(image_identity);
  ChannelClassification c;
  c.tolerance_used = tol;
  c.trace_nonincreasing = tp_lo >= -tol;
  c.trace_preserving = tp_lo >= -tol && tp_hi <= tol;
  c.subunital = u_lo >= -tol;
  c.unital = u_lo >= -tol && u_hi <= tol;
  return c;
}

// ---------------------------------------------------------------------------
// Choi matrix: (I kron P)(|Phi><Phi|), |Phi> = N^{-1/2} sum_i |i>|i>.
// Entry ((i,l),(j,k)) at row i*N + l, column j*N + k equals <l|P(|i><j|)|k> / N.

inline Matrix choi_matrix(const Superoperator& sop) {
  const Eigen::Index n = sop.dim();
  Matrix choi(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      // vec(|i><j|) is the unit vector at i + j*n.
      const Operator image = devectorize(sop.matrix().col(i + j * n), n);
      choi.block(i * n, j * n, n, n) = image / static_cast<double>(n);
    }
  }
  return choi;
}

inline Matrix choi_matrix(const KrausMap& map) { return choi_matrix(map.superoperator()); }

inline double choi_min_eigenvalue(const Superoperator& sop) {
  const Matrix choi = choi_matrix(sop);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(choi), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

/// Choi criterion. A non-Hermitian Choi matrix (map not Hermiticity
/// preserving) is never completely positive.
inline bool is_completely_positive(const Superoperator& sop, double tol = Tolerances{}.positivity) {
  const Matrix choi = choi_matrix(sop);
  if ((choi - choi.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  return choi_min_eigenvalue(sop) >= -tol;
}

inline bool is_completely_positive(const KrausMap& map, double tol = Tolerances{}.positivity) {
  return is_completely_positive(map.superoperator(), tol);
}

/// Kraus operators of a completely positive superoperator, from the
/// eigendecomposition of its Choi matrix. Throws PreconditionError when the
/// map fails the Choi criterion.
inline KrausMap kraus_from_superoperator(const Superoperator& sop, const Tolerances& tol = {}) {
  detail::require(is_completely_positive(sop, tol.positivity),
                  "superoperator is not completely positive (Choi min eigenvalue " +
                      std::to_string(choi_min_eigenvalue(sop)) + ")");
  const Eigen::Index n = sop.dim();
  const Matrix choi = hermitian_part(choi_matrix(sop));
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(choi);
  const double largest = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  std::vector<Operator> kraus;
  for (Eigen::Index m = n * n - 1; m >= 0; --m) {
    const double mu = eig.eigenvalues()(m);
    if (mu <= tol.rank * std::max(largest, 1.0)) continue;
    // Eigenvector entry at i*n + l holds <l|A|i> / sqrt(n) up to the weight.
    const Vector v = eig.eigenvectors().col(m);
    Operator a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index l = 0; l < n; ++l) a(l, i) = v(i * n + l);
    kraus.push_back(std::sqrt(mu * static_cast<double>(n)) * a);
  }
  if (kraus.empty()) kraus.push_back(Operator::Zero(n, n));
  return KrausMap(std::move(kraus));
}

}  // namespace qmarkov
