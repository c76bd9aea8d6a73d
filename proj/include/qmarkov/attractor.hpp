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
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qmarkov/channel.hpp"
#include "qmarkov/errors.hpp"
#include "qmarkov/invariants.hpp"
#include "qmarkov/linalg.hpp"
#include "qmarkov/operator_space.hpp"
#include "qmarkov/spectral.hpp"
#include "qmarkov/tolerances.hpp"

namespace qmarkov {

enum class DualRoute { spectral_left_eigenvectors, rho_formula, algebraic };

inline const char* to_string(DualRoute route) {
  switch (route) {
    case DualRoute::spectral_left_eigenvectors:
      return "spectral_left_eigenvectors";
    case DualRoute::rho_formula:
      return "rho_formula";
    case DualRoute::algebraic:
      return "algebraic";
  }
  return "unknown";
}

/// One attractor direction: P(x) = lambda x, with dual satisfying
/// Tr(dual_a^dagger x_b) = delta_ab over the whole basis.
struct AttractorEntry {
  Complex lambda;
  Operator x;
  Operator dual;
  /// Position inside the lambda eigenspace.
  int index = 0;
};

struct AttractorBasis {
  Eigen::Index dim = 0;
  std::vector<AttractorEntry> entries;
  std::optional<Operator> rho_used;
  DualRoute route = DualRoute::spectral_left_eigenvectors;

  std::size_t size() const { return entries.size(); }
};

/// max_ab |Tr(dual_a^dagger x_b) - delta_ab|.
inline double biorthonormality_deviation(const AttractorBasis& basis) {
  double worst = 0.0;
  for (std::size_t a = 0; a < basis.size(); ++a)
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const Complex g = hs_inner(basis.entries[a].dual, basis.entries[b].x);
      worst = std::max(worst, std::abs(g - (a == b ? 1.0 : 0.0)));
    }
  return worst;
}

/// Pi(X) = sum_a x_a Tr(dual_a^dagger X).
inline Operator attractor_projector(const AttractorBasis& basis, const Operator& x) {
  detail::require(x.rows() == basis.dim && x.cols() == basis.dim, "attractor_projector: dimension mismatch");
  Operator out = Operator::Zero(basis.dim, basis.dim);
  for (const AttractorEntry& e : basis.entries) out += hs_inner(e.dual, x) * e.x;
  return out;
}

/// Spectral route: peripheral eigenvectors with their biorthonormalized left
/// eigenvectors as duals.
inline AttractorBasis attractor_basis(const SpectralData& spectrum) {
  AttractorBasis basis;
  basis.dim = spectrum.dim;
  basis.route = DualRoute::spectral_left_eigenvectors;
  for (const PeripheralCluster& c : spectrum.peripheral_clusters) {
    int index = 0;
    for (std::size_t i : c.indices)
      basis.entries.push_back({c.lambda, spectrum.right_vectors[i], spectrum.left_vectors[i], index++});
  }
  return basis;
}

inline AttractorBasis attractor_basis(const KrausMap& map, const Tolerances& tol = {}) {
  detail::require(classify(map, tol.positivity).trace_nonincreasing,
                  "attractor_basis: map is not trace non-increasing");
  return attractor_basis(full_spectrum(map, tol));
}

namespace detail {

inline void require_rho_preconditions(const KrausMap& map, const Operator& rho, const Tolerances& tol,
                                      const char* what) {
  validate_operator(rho, "rho");
  require(rho.rows() == map.dim(), std::string(what) + ": rho dimension does not match the map");
  require(positivity_report(rho, tol.positivity).is_strictly_positive,
          std::string(what) + ": rho is not strictly positive");
  require(check_subinvariant(map, rho, tol.positivity), std::string(what) + ": rho is not subinvariant (P(rho) <= rho fails)");
}

// Groups of entry positions sharing a lambda (within tol).
template <class GetLambda>
std::vector<std::vector<std::size_t>> group_by_lambda(std::size_t count, GetLambda get, double tol) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<Complex> reps;
  for (std::size_t i = 0; i < count; ++i) {
    const Complex lambda = get(i);
    std::size_t g = 0;
    while (g < reps.size() && std::abs(reps[g] - lambda) >= tol) ++g;
    if (g == reps.size()) {
      reps.push_back(lambda);
      groups.emplace_back();
    }
    groups[g].push_back(i);
  }
  return groups;
}

inline Complex snap_to_circle(Complex lambda, double tol) {
  require(std::abs(std::abs(lambda) - 1.0) <= tol, "lambda is not of unit modulus");
  Complex snapped = lambda / std::abs(lambda);
  if (std::abs(snapped - 1.0) <= tol) snapped = 1.0;
  return snapped;
}

}  // namespace detail

/// rho route: within every eigenvalue the operators are first
/// rho-orthogonalized by Gram-Schmidt (the first one is kept as given, later
/// ones lose their components along earlier ones, dependent ones are
/// dropped), then dual = X rho^{-1} / Tr(X^dagger X rho^{-1}).
inline AttractorBasis dual_basis_rho(const KrausMap& map, std::span<const std::pair<Complex, Operator>> basis_x,
                                     const Operator& rho, const Tolerances& tol = {}) {
  detail::require_rho_preconditions(map, rho, tol, "dual_basis_rho");
  const Operator rho_inv = inverse_strictly_positive(rho, tol.positivity);
  AttractorBasis out;
  out.dim = map.dim();
  out.route = DualRoute::rho_formula;
  out.rho_used = rho;
  const auto groups = detail::group_by_lambda(
      basis_x.size(), [&](std::size_t i) { return basis_x[i].first; }, tol.peripheral);
  for (const auto& group : groups) {
    std::vector<Operator> kept;
    std::vector<double> kept_norm2;
    for (std::size_t i : group) {
      const Operator& x = basis_x[i].second;
      detail::require(x.rows() == map.dim() && x.cols() == map.dim(), "dual_basis_rho: operator dimension mismatch");
      const double original = rho_norm_with_inverse(x, rho_inv);
      Operator r = x;
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t m = 0; m < kept.size(); ++m)
          r -= (rho_inner_with_inverse(kept[m], r, rho_inv) / kept_norm2[m]) * kept[m];
      const double remainder = rho_norm_with_inverse(r, rho_inv);
      if (!(remainder > tol.rank * original)) continue;
      kept.push_back(std::move(r));
      kept_norm2.push_back(remainder * remainder);
    }
    int index = 0;
    for (const Operator& x : kept) {
      const Complex norm = hs_inner(x, x * rho_inv);
      if (std::abs(norm) <= tol.rank * tol.rank) throw PreconditionError("dual_basis_rho: normalization trace vanishes");
      out.entries.push_back({basis_x[group.front()].first, x, x * rho_inv / norm, index++});
    }
  }
  return out;
}

inline AttractorBasis dual_basis_rho(const KrausMap& map, const AttractorBasis& basis, const Operator& rho,
                                     const Tolerances& tol = {}) {
  std::vector<std::pair<Complex, Operator>> xs;
  for (const AttractorEntry& e : basis.entries) xs.emplace_back(e.lambda, e.x);
  return dual_basis_rho(map, xs, rho, tol);
}

/// Re-expresses the duals of `spectral` for a different basis of the same
/// eigenspaces: each new X must lie in the span of the entries sharing its
/// lambda, and each eigenspace must receive as many new operators as it has
/// entries.
inline AttractorBasis rebase_duals(const AttractorBasis& spectral, std::span<const std::pair<Complex, Operator>> new_x,
                                   const Tolerances& tol = {}) {
  AttractorBasis out;
  out.dim = spectral.dim;
  out.route = spectral.route;
  const auto groups = detail::group_by_lambda(
      new_x.size(), [&](std::size_t i) { return new_x[i].first; }, tol.peripheral);
  for (const auto& group : groups) {
    const Complex lambda = new_x[group.front()].first;
    std::vector<const AttractorEntry*> old;
    for (const AttractorEntry& e : spectral.entries)
      if (std::abs(e.lambda - lambda) < tol.peripheral) old.push_back(&e);
    detail::require(old.size() == group.size(), "rebase_duals: eigenspace dimension mismatch");
    const auto d = static_cast<Eigen::Index>(group.size());
    Matrix coeff(d, d);
    Matrix old_duals(spectral.dim * spectral.dim, d);
    for (Eigen::Index a = 0; a < d; ++a) {
      old_duals.col(a) = vectorize(old[static_cast<std::size_t>(a)]->dual);
      for (Eigen::Index b = 0; b < d; ++b)
        coeff(a, b) = hs_inner(old[static_cast<std::size_t>(a)]->dual, new_x[group[static_cast<std::size_t>(b)]].second);
    }
    const Matrix duals = old_duals * coeff.inverse().adjoint();
    for (Eigen::Index b = 0; b < d; ++b)
      out.entries.push_back({lambda, new_x[group[static_cast<std::size_t>(b)]].second,
                             devectorize(duals.col(b), spectral.dim), static_cast<int>(b)});
  }
  return out;
}

namespace detail {

// Rows of the linear system in vec(X) whose null space is D_{lambda,rho}:
//   A X r = l X r A,  A^+ X r = l* X r A^+,  A r X = l r X A,  A^+ r X = l* r X A^+
// with r = rho^{-1}, using vec(L X R) = (R^T kron L) vec(X).
inline Matrix structure_system(const KrausMap& map, const Operator& rho_inv, Complex lambda) {
  const Eigen::Index n = map.dim();
  const Operator id = identity(n);
  const Eigen::Index side = n * n;
  const auto k = static_cast<Eigen::Index>(map.size());
  Matrix system(4 * k * side, side);
  for (Eigen::Index j = 0; j < k; ++j) {
    const Operator& a = map.kraus()[static_cast<std::size_t>(j)];
    const Operator ad = a.adjoint();
    const Complex lc = std::conj(lambda);
    system.middleRows((4 * j + 0) * side, side) =
        linalg::kron(rho_inv.transpose(), a) - lambda * linalg::kron((rho_inv * a).transpose(), id);
    system.middleRows((4 * j + 1) * side, side) =
        linalg::kron(rho_inv.transpose(), ad) - lc * linalg::kron((rho_inv * ad).transpose(), id);
    system.middleRows((4 * j + 2) * side, side) =
        linalg::kron(id, a * rho_inv) - lambda * linalg::kron(a.transpose(), rho_inv);
    system.middleRows((4 * j + 3) * side, side) =
        linalg::kron(id, ad * rho_inv) - lc * linalg::kron(ad.transpose(), rho_inv);
  }
  return system;
}

}  // namespace detail

/// Algebraic route: HS-orthonormal canonical basis of the set D_{lambda,rho}
/// of operators satisfying the four Kraus commutation relations for every
/// Kraus operator. It always contains Ker(P - lambda I) and equals it when
/// P(rho) = rho.
inline SubspaceBasis algebraic_attractor(const KrausMap& map, const Operator& rho, Complex lambda,
                                         const Tolerances& tol = {}) {
  detail::require_rho_preconditions(map, rho, tol, "algebraic_attractor");
  const Complex unit = detail::snap_to_circle(lambda, tol.peripheral);
  const Operator rho_inv = inverse_strictly_positive(rho, tol.positivity);
  const Matrix kernel = linalg::null_space(detail::structure_system(map, rho_inv, unit), tol.rank);
  SubspaceBasis basis;
  basis.orthonormal_under = InnerProduct::hs;
  basis.elements = detail::columns_to_operators(linalg::canonical_basis(kernel), map.dim());
  return basis;
}

/// Residuals of the structure relations between a map, a strictly positive
/// subinvariant rho and the peripheral eigenoperators of an attractor basis.
/// Every eigenoperator is normalized to unit HS norm before evaluation, and
/// inner products are reported as cosines under the rho-inner product.
struct StructureEquationReport {
  /// ||P^dagger(X rho^-1) - conj(lambda) X rho^-1||.
  double adjoint_right = 0.0;
  /// ||P^dagger(rho^-1 X) - conj(lambda) rho^-1 X||.
  double adjoint_left = 0.0;
  /// ||P(rho^-1 X rho) - lambda rho^-1 X rho||.
  double similarity = 0.0;
  /// max |<K, R>_rho| over the kernel and range of P - lambda I.
  double kernel_range_orthogonality = 0.0;
  /// max |<X_a, X_b>_rho| across distinct peripheral eigenvalues.
  double eigenspace_orthogonality = 0.0;
  /// The four Kraus relation families, in the order of structure_system.
  std::array<double, 4> kraus_equations{};
  /// ||rho2 A_j X rho^-1 - lambda rho2 X rho^-1 A_j||, for the supplied rho2
  /// (identity by default).
  double kraus_rho2 = 0.0;
  /// dim D_{lambda,rho} per peripheral eigenvalue, aligned with kernel_dims.
  std::vector<Eigen::Index> algebraic_dims;
  std::vector<Eigen::Index> kernel_dims;
  bool dimension_match = true;
  double max_residual = 0.0;

  bool passed(double tol) const { return max_residual <= tol && dimension_match; }
};

inline StructureEquationReport verify_structure(const KrausMap& map, const Operator& rho, const AttractorBasis& basis,
                                                const Tolerances& tol = {},
                                                const std::optional<Operator>& rho2 = std::nullopt) {
  detail::require_rho_preconditions(map, rho, tol, "verify_structure");
  detail::require(basis.dim == map.dim(), "verify_structure: basis dimension does not match the map");
  const Eigen::Index n = map.dim();
  const Operator weight = rho2.value_or(identity(n));
  validate_operator(weight, "rho2");
  detail::require(weight.rows() == n, "verify_structure: rho2 dimension does not match the map");
  detail::require(positivity_report(weight, tol.positivity).is_positive_semidefinite,
                  "verify_structure: rho2 is not positive semidefinite");
  detail::require(check_subinvariant(map.adjoint(), weight, tol.positivity),
                  "verify_structure: rho2 fails P^dagger(rho2) <= rho2");

  const Operator rho_inv = inverse_strictly_positive(rho, tol.positivity);
  StructureEquationReport report;
  for (const AttractorEntry& e : basis.entries) {
    const double scale = hs_norm(e.x);
    detail::require(scale > 0.0, "verify_structure: zero basis operator");
    const Operator x = e.x / scale;
    const Complex lc = std::conj(e.lambda);
    const Operator xr = x * rho_inv;
    const Operator rx = rho_inv * x;
    report.adjoint_right = std::max(report.adjoint_right, hs_norm(map.adjoint_apply(xr) - lc * xr));
    report.adjoint_left = std::max(report.adjoint_left, hs_norm(map.adjoint_apply(rx) - lc * rx));
    const Operator sim = rho_inv * x * rho;
    report.similarity = std::max(report.similarity, hs_norm(map.apply(sim) - e.lambda * sim));
    for (const Operator& a : map.kraus()) {
      const Operator ad = a.adjoint();
      auto& k = report.kraus_equations;
      k[0] = std::max(k[0], hs_norm(a * xr - e.lambda * xr * a));
      k[1] = std::max(k[1], hs_norm(ad * xr - lc * xr * ad));
      k[2] = std::max(k[2], hs_norm(a * rx - e.lambda * rx * a));
      k[3] = std::max(k[3], hs_norm(ad * rx - lc * rx * ad));
      report.kraus_rho2 = std::max(report.kraus_rho2, hs_norm(weight * a * xr - e.lambda * weight * xr * a));
    }
  }

  const auto cosine = [&](const Operator& p, const Operator& q) {
    const double np = rho_norm_with_inverse(p, rho_inv);
    const double nq = rho_norm_with_inverse(q, rho_inv);
    if (np == 0.0 || nq == 0.0) return 0.0;
    return std::abs(rho_inner_with_inverse(p, q, rho_inv)) / (np * nq);
  };
  for (const AttractorEntry& a : basis.entries)
    for (const AttractorEntry& b : basis.entries)
      if (std::abs(a.lambda - b.lambda) >= tol.peripheral)
        report.eigenspace_orthogonality = std::max(report.eigenspace_orthogonality, cosine(a.x, b.x));

  const auto groups = detail::group_by_lambda(
      basis.size(), [&](std::size_t i) { return basis.entries[i].lambda; }, tol.peripheral);
  for (const auto& group : groups) {
    const Complex lambda = basis.entries[group.front()].lambda;
    const SubspaceBasis range = range_basis(map, lambda, tol);
    for (std::size_t i : group)
      for (const Operator& r : range.elements)
        report.kernel_range_orthogonality = std::max(report.kernel_range_orthogonality, cosine(basis.entries[i].x, r));
    const SubspaceBasis algebraic = algebraic_attractor(map, rho, lambda, tol);
    report.algebraic_dims.push_back(static_cast<Eigen::Index>(algebraic.size()));
    report.kernel_dims.push_back(static_cast<Eigen::Index>(group.size()));
    if (algebraic.size() != group.size()) report.dimension_match = false;
  }

  report.max_residual = std::max({report.adjoint_right, report.adjoint_left, report.similarity,
                                  report.kernel_range_orthogonality, report.eigenspace_orthogonality,
                                  report.kraus_rho2});
  for (double k : report.kraus_equations) report.max_residual = std::max(report.max_residual, k);
  return report;
}

/// ||P(Y) - lambda1 lambda2 Y|| for Y = X1 X2 rho^{-1}. Requires P(rho) = rho
/// within tol, rho strictly positive, and X1, X2 eigenoperators (relative
/// residual at most tol).
inline double product_closure_check(const KrausMap& map, const Operator& rho, const Operator& x1, Complex lambda1,
                                    const Operator& x2, Complex lambda2, const Tolerances& tol = {},
                                    double fixed_tol = 1e-8) {
  validate_operator(rho, "rho");
  detail::require(rho.rows() == map.dim(), "product_closure_check: dimension mismatch");
  const Operator rho_inv = inverse_strictly_positive(rho, tol.positivity);
  detail::require(hs_norm(map.apply(rho) - rho) <= fixed_tol, "product_closure_check: rho is not a fixed point");
  const auto is_eigen = [&](const Operator& x, Complex lambda) {
    return hs_norm(map.apply(x) - lambda * x) <= fixed_tol * std::max(1.0, hs_norm(x));
  };
  detail::require(is_eigen(x1, lambda1), "product_closure_check: X1 is not an eigenoperator");
  detail::require(is_eigen(x2, lambda2), "product_closure_check: X2 is not an eigenoperator");
  const Operator y = x1 * x2 * rho_inv;
  return hs_norm(map.apply(y) - lambda1 * lambda2 * y);
}

}  // namespace qmarkov
