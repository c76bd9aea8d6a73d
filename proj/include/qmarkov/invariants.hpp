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
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qmarkov/channel.hpp"
#include "qmarkov/errors.hpp"
#include "qmarkov/operator_space.hpp"
#include "qmarkov/tolerances.hpp"

namespace qmarkov {

struct InvariantStateResult {
  Operator state;
  /// ||P(state) - state||_HS.
  double residual = 0.0;
  /// One plus the number of map applications performed.
  long long iterations_used = 0;
  bool converged = false;
  bool strictly_positive = false;
  /// Number of eigenvalues above tol.rank times the largest.
  Eigen::Index support_dim = 0;
};

namespace detail {

inline void require_trace_preserving(const KrausMap& map, const Tolerances& tol, const char* what) {
  require(classify(map, tol.positivity).trace_preserving, std::string(what) + ": map is not trace preserving");
}

inline void require_state(const Operator& rho, const char* what) {
  validate_operator(rho, what);
  const HermitianReport report = positivity_report(rho, 1e-9);
  require(report.is_positive_semidefinite, std::string(what) + ": not positive semidefinite");
  require(std::abs(rho.trace() - 1.0) <= 1e-9, std::string(what) + ": trace is not 1");
}

inline Eigen::Index support_rank(const Operator& state, double rank_tol) {
  const Eigen::SelfAdjointEigenSolver<Operator> eig(hermitian_part(state), Eigen::EigenvaluesOnly);
  const double largest = eig.eigenvalues().maxCoeff();
  if (largest <= 0.0) return 0;
  return static_cast<Eigen::Index>((eig.eigenvalues().array() > rank_tol * largest).count());
}

inline void fill_flags(InvariantStateResult& result, const Tolerances& tol) {
  result.strictly_positive = positivity_report(result.state, tol.positivity).is_strictly_positive;
  result.support_dim = support_rank(result.state, tol.rank);
}

}  // namespace detail

/// Running Cesaro average of P^k(rho0), stopping once ||P(avg) - avg|| <=
/// residual_tol or after n_max map applications.
///
/// The average is restarted from its current value at the end of epochs of
/// doubling length (64, 128, ...). The Cesaro projection commutes with P, so
/// the restarted sequence has the same limit, while the residual of a plain
/// average only falls like 1/n. The residual is checked every 32 steps.
inline InvariantStateResult cesaro_average(const KrausMap& map, const Operator& rho0, long long n_max,
                                           double residual_tol, const Tolerances& tol = {}) {
  detail::require_trace_preserving(map, tol, "cesaro_average");
  detail::require(rho0.rows() == map.dim() && rho0.cols() == map.dim(), "cesaro_average: dimension mismatch");
  detail::require_state(rho0, "cesaro_average: rho0");
  detail::require(n_max >= 0, "cesaro_average: n_max must be nonnegative");

  const Matrix& s = map.superoperator().matrix();
  const auto residual_of = [&s](const Vector& v) { return (s * v - v).norm(); };

  Vector avg = vectorize(rho0);
  Vector current = avg;
  long long applications = 0;
  long long epoch_length = 64;
  long long terms = 1;
  double residual = residual_of(avg);
  while (residual > residual_tol && applications < n_max) {
    current = s * current;
    ++applications;
    ++terms;
    avg += (current - avg) / static_cast<double>(terms);
    if (terms % 32 == 0 || applications == n_max) residual = residual_of(avg);
    if (terms == epoch_length && residual > residual_tol) {
      current = avg;
      terms = 1;
      epoch_length *= 2;
    }
  }

  InvariantStateResult result;
  result.state = hermitian_part(devectorize(avg, map.dim()));
  result.residual = hs_norm(map.apply(result.state) - result.state);
  result.iterations_used = applications + 1;
  result.converged = result.residual <= residual_tol;
  detail::fill_flags(result, tol);
  return result;
}

/// Nearest PSD unit-trace operator: negative eigenvalues are clipped. Throws
/// NumericalError when more than 1e-6 of trace mass had to be clipped.
inline Operator project_to_state(const Operator& x) {
  const Eigen::SelfAdjointEigenSolver<Operator> eig(hermitian_part(x));
  Eigen::VectorXd values = eig.eigenvalues();
  double clipped = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) < 0.0) {
      clipped -= values(i);
      values(i) = 0.0;
    }
  }
  if (clipped > 1e-6) {
    std::ostringstream msg;
    msg << "state projection clipped negative mass " << clipped;
    throw NumericalError(msg.str());
  }
  const double trace = values.sum();
  if (!(trace > 0.0)) throw NumericalError("state projection: vanishing trace");
  const Operator state = eig.eigenvectors() * (values / trace).asDiagonal() * eig.eigenvectors().adjoint();
  return hermitian_part(state);
}

/// Cesaro limit from the maximally mixed state, projected to a state.
inline InvariantStateResult find_invariant_state(const KrausMap& map, double residual_tol = 1e-13,
                                                 const Tolerances& tol = {}, long long n_max = 1'000'000) {
  const Eigen::Index n = map.dim();
  InvariantStateResult result =
      cesaro_average(map, identity(n) / static_cast<double>(n), n_max, residual_tol, tol);
  result.state = project_to_state(result.state);
  result.residual = hs_norm(map.apply(result.state) - result.state);
  result.converged = result.residual <= residual_tol;
  detail::fill_flags(result, tol);
  return result;
}

/// True iff rho - P(rho) >= -tol in operator order.
inline bool check_subinvariant(const KrausMap& map, const Operator& rho, double tol = Tolerances{}.positivity) {
  validate_operator(rho, "rho");
  detail::require(rho.rows() == map.dim(), "check_subinvariant: dimension mismatch");
  detail::require(positivity_report(rho, tol).is_positive_semidefinite,
                  "check_subinvariant: rho is not positive semidefinite");
  const Operator gap = hermitian_part(rho - map.apply(rho));
  const Eigen::SelfAdjointEigenSolver<Operator> eig(gap, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol;
}

/// Columns: orthonormal eigenvectors of rho with eigenvalue above
/// rel_tol times the largest eigenvalue.
inline Matrix support_isometry(const Operator& rho, double rel_tol) {
  validate_operator(rho, "rho");
  const Eigen::SelfAdjointEigenSolver<Operator> eig(hermitian_part(rho));
  const double largest = eig.eigenvalues().maxCoeff();
  detail::require(largest > 1e-300, "support_projection: rho has empty support");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = eig.eigenvalues().size() - 1; i >= 0; --i)
    if (eig.eigenvalues()(i) > rel_tol * largest) keep.push_back(i);
  Matrix v(rho.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) v.col(static_cast<Eigen::Index>(k)) = eig.eigenvectors().col(keep[k]);
  return v;
}

/// Orthogonal projector onto the support of rho.
inline Operator support_projection(const Operator& rho, double rel_tol = Tolerances{}.rank) {
  const Matrix v = support_isometry(rho, rel_tol);
  return v * v.adjoint();
}

/// A map restricted to B(P H) for a reducing projection P.
struct ReducedChannel {
  Operator projector;
  /// dim x r, orthonormal columns spanning the range of projector.
  Matrix isometry;
  KrausMap reduced_map;
  /// The state whose support defined the projector, when one was used.
  std::optional<Operator> state;

  Operator compress(const Operator& x) const { return isometry.adjoint() * x * isometry; }
  Operator embed(const Operator& y) const { return isometry * y * isometry.adjoint(); }
};

/// Restriction A_j -> V^dagger A_j V to the range of `projector`. Throws
/// PreconditionError unless projector is an orthogonal projection with
/// P(Q X Q) = Q P(Q X Q) Q for every X (checked on a basis, within tol).
inline ReducedChannel reduce_channel(const KrausMap& map, const Operator& projector, double tol = 1e-9) {
  validate_operator(projector, "projector");
  detail::require(projector.rows() == map.dim(), "reduce_channel: dimension mismatch");
  detail::require((projector * projector - projector).cwiseAbs().maxCoeff() <= tol &&
                      (projector - projector.adjoint()).cwiseAbs().maxCoeff() <= tol,
                  "reduce_channel: projector is not an orthogonal projection");
  const Eigen::SelfAdjointEigenSolver<Operator> eig(hermitian_part(projector));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = eig.eigenvalues().size() - 1; i >= 0; --i)
    if (eig.eigenvalues()(i) > 0.5) keep.push_back(i);
  detail::require(!keep.empty(), "reduce_channel: projector is zero");
  Matrix v(map.dim(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) v.col(static_cast<Eigen::Index>(k)) = eig.eigenvectors().col(keep[k]);
  const Operator q = v * v.adjoint();

  const Eigen::Index r = v.cols();
  for (Eigen::Index a = 0; a < r; ++a) {
    for (Eigen::Index b = 0; b < r; ++b) {
      const Operator x = v.col(a) * v.col(b).adjoint();
      const Operator image = map.apply(x);
      if (hs_norm(image - q * image * q) > tol)
        throw PreconditionError("reduce_channel: projector does not reduce the map");
    }
  }
  std::vector<Operator> reduced;
  for (const Operator& a : map.kraus()) reduced.push_back(v.adjoint() * a * v);
  return ReducedChannel{q, v, KrausMap(std::move(reduced)), std::nullopt};
}

/// The N^2 pure states |i><i|, |i+j><i+j|/2 and |i+ij><i+ij|/2 (i < j);
/// they span B(H).
inline std::vector<Operator> spanning_states(Eigen::Index dim) {
  std::vector<Operator> states;
  for (Eigen::Index i = 0; i < dim; ++i) states.push_back(matrix_unit(dim, i, i));
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = i + 1; j < dim; ++j) {
      Vector plus = Vector::Zero(dim);
      plus(i) = 1.0;
      plus(j) = 1.0;
      states.push_back(plus * plus.adjoint() / 2.0);
      Vector phase = Vector::Zero(dim);
      phase(i) = 1.0;
      phase(j) = Complex(0.0, 1.0);
      states.push_back(phase * phase.adjoint() / 2.0);
    }
  }
  return states;
}

/// Restriction of a channel to its recurrent subspace: the support of a
/// maximal invariant state, built as the average of the Cesaro limits of
/// spanning_states(). The Cesaro limit is linear, so this is computed as one
/// Cesaro run from the averaged initial state. Supports are cut at
/// support_rel_tol times the largest eigenvalue.
inline ReducedChannel recurrent_subspace(const KrausMap& map, const Tolerances& tol = {},
                                         double residual_tol = 1e-13, double support_rel_tol = 1e-8,
                                         long long n_max = 1'000'000) {
  detail::require_trace_preserving(map, tol, "recurrent_subspace");
  const Eigen::Index n = map.dim();
  const std::vector<Operator> family = spanning_states(n);
  Operator start = Operator::Zero(n, n);
  for (const Operator& s : family) start += s;
  start /= static_cast<double>(family.size());
  const InvariantStateResult limit = cesaro_average(map, start, n_max, residual_tol, tol);
  if (!limit.converged) {
    std::ostringstream msg;
    msg << "recurrent_subspace: Cesaro average did not converge (residual " << limit.residual << ")";
    throw NumericalError(msg.str());
  }
  const Operator maximal = project_to_state(limit.state);
  ReducedChannel reduced = reduce_channel(map, support_projection(maximal, support_rel_tol));
  reduced.state = maximal;
  return reduced;
}

}  // namespace qmarkov
