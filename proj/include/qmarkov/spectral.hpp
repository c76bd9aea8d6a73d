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
#include <numbers>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qmarkov/channel.hpp"
#include "qmarkov/errors.hpp"
#include "qmarkov/linalg.hpp"
#include "qmarkov/operator_space.hpp"
#include "qmarkov/tolerances.hpp"

namespace qmarkov {

/// A group of numerically coincident unit-modulus eigenvalues.
struct PeripheralCluster {
  /// Cluster mean, snapped to modulus one (and to exactly 1 when within
  /// tolerance of it).
  Complex lambda;
  /// Phase of lambda in [0, 2 pi).
  double phase = 0.0;
  /// Positions in SpectralData::eigenvalues.
  std::vector<std::size_t> indices;
  int multiplicity = 0;
};

/// Eigen-analysis of a superoperator.
///
/// Eigenvalues are sorted with the peripheral clusters first (ascending
/// phase), then the rest by descending modulus and ascending phase. For
/// peripheral positions right_vectors hold an HS-orthonormal canonical basis
/// of the cluster eigenspace and left_vectors its biorthonormal partner
/// (Tr(L_a^dagger R_b) = delta_ab). For the remaining positions right_vectors
/// are the solver's eigenvectors; their left partners are only available
/// when decaying_left_available is set (the full right eigenvector matrix was
/// well conditioned), otherwise left_vectors stops after the peripheral part.
struct SpectralData {
  Eigen::Index dim = 0;
  std::vector<Complex> eigenvalues;
  std::vector<Operator> right_vectors;
  std::vector<Operator> left_vectors;
  std::vector<PeripheralCluster> peripheral_clusters;
  double tol_peripheral = 0.0;
  bool decaying_left_available = false;

  std::size_t peripheral_count() const {
    std::size_t n = 0;
    for (const auto& c : peripheral_clusters) n += c.indices.size();
    return n;
  }

  double spectral_radius() const {
    double r = 0.0;
    for (const Complex& z : eigenvalues) r = std::max(r, std::abs(z));
    return r;
  }

  /// Largest modulus strictly inside the unit disc (outside every cluster);
  /// zero when every eigenvalue is peripheral.
  double subperipheral_modulus() const {
    double q = 0.0;
    for (std::size_t i = peripheral_count(); i < eigenvalues.size(); ++i) q = std::max(q, std::abs(eigenvalues[i]));
    return q;
  }
};

enum class InnerProduct { hs, rho, none };

/// A linearly independent set of operators.
struct SubspaceBasis {
  std::vector<Operator> elements;
  InnerProduct orthonormal_under = InnerProduct::none;
  std::optional<Operator> rho;

  std::size_t size() const { return elements.size(); }
};

namespace detail {

inline double phase_of(Complex z, double tol) {
  double phase = std::arg(z);
  if (phase < 0.0) phase += 2.0 * std::numbers::pi;
  if (phase >= 2.0 * std::numbers::pi - tol) phase = 0.0;
  return phase;
}

inline std::vector<Operator> columns_to_operators(const Matrix& columns, Eigen::Index dim) {
  std::vector<Operator> out;
  out.reserve(static_cast<std::size_t>(columns.cols()));
  for (Eigen::Index j = 0; j < columns.cols(); ++j) out.push_back(devectorize(columns.col(j), dim));
  return out;
}

inline Matrix operators_to_columns(std::span<const Operator> ops, Eigen::Index dim) {
  Matrix m(dim * dim, static_cast<Eigen::Index>(ops.size()));
  for (std::size_t j = 0; j < ops.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = vectorize(ops[j]);
  return m;
}

inline Matrix shifted(const Superoperator& sop, Complex lambda) {
  const Eigen::Index side = sop.matrix().rows();
  return sop.matrix() - lambda * Matrix::Identity(side, side);
}

inline Eigen::VectorXcd eigenvalues_only(const Superoperator& sop) {
  const Eigen::ComplexEigenSolver<Matrix> solver(sop.matrix(), false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed on superoperator");
  return solver.eigenvalues();
}

inline void require_near_eigenvalue(const Superoperator& sop, Complex lambda, double tol) {
  const Eigen::VectorXcd ev = eigenvalues_only(sop);
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) best = std::min(best, std::abs(ev(i) - lambda));
  if (!(best <= tol)) {
    std::ostringstream msg;
    msg << "lambda = " << lambda << " is not an eigenvalue (nearest at distance " << best << ")";
    throw PreconditionError(msg.str());
  }
}

}  // namespace detail

/// Dense eigendecomposition with peripheral clustering and biorthonormal
/// peripheral left/right bases.
inline SpectralData full_spectrum(const Superoperator& sop, const Tolerances& tol = {}) {
  const Eigen::Index n = sop.dim();
  const Eigen::Index side = n * n;
  const Eigen::ComplexEigenSolver<Matrix> solver(sop.matrix(), true);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed on superoperator");
  const Eigen::VectorXcd& values = solver.eigenvalues();

  // Single-linkage clustering of the unit-modulus eigenvalues.
  std::vector<Eigen::Index> peripheral;
  std::vector<Eigen::Index> decaying;
  for (Eigen::Index i = 0; i < side; ++i) {
    if (std::abs(1.0 - std::abs(values(i))) <= tol.peripheral)
      peripheral.push_back(i);
    else
      decaying.push_back(i);
  }
  std::vector<int> label(peripheral.size(), -1);
  int clusters = 0;
  for (std::size_t a = 0; a < peripheral.size(); ++a) {
    if (label[a] >= 0) continue;
    label[a] = clusters;
    std::vector<std::size_t> stack{a};
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < peripheral.size(); ++b) {
        if (label[b] < 0 && std::abs(values(peripheral[cur]) - values(peripheral[b])) < tol.peripheral) {
          label[b] = clusters;
          stack.push_back(b);
        }
      }
    }
    ++clusters;
  }

  struct RawCluster {
    Complex lambda;
    double phase;
    std::vector<Eigen::Index> members;
  };
  std::vector<RawCluster> raw(static_cast<std::size_t>(clusters));
  for (std::size_t a = 0; a < peripheral.size(); ++a) raw[static_cast<std::size_t>(label[a])].members.push_back(peripheral[a]);
  for (RawCluster& c : raw) {
    Complex mean = 0.0;
    for (Eigen::Index i : c.members) mean += values(i);
    mean /= static_cast<double>(c.members.size());
    c.lambda = mean / std::abs(mean);
    if (std::abs(c.lambda - 1.0) <= tol.peripheral) c.lambda = 1.0;
    c.phase = detail::phase_of(c.lambda, tol.peripheral);
  }
  std::sort(raw.begin(), raw.end(), [](const RawCluster& x, const RawCluster& y) { return x.phase < y.phase; });
  std::sort(decaying.begin(), decaying.end(), [&](Eigen::Index x, Eigen::Index y) {
    const double mx = std::abs(values(x));
    const double my = std::abs(values(y));
    if (mx != my) return mx > my;
    return detail::phase_of(values(x), 0.0) < detail::phase_of(values(y), 0.0);
  });

  SpectralData data;
  data.dim = n;
  data.tol_peripheral = tol.peripheral;
  std::vector<Operator> left_peripheral;
  for (const RawCluster& c : raw) {
    const auto d = static_cast<Eigen::Index>(c.members.size());
    const Matrix shifted = detail::shifted(sop, c.lambda);
    const double scale = std::max(1.0, sop.matrix().norm());
    const double defect = 10.0 * tol.peripheral * scale;
    auto [right, right_sv] = linalg::smallest_right_singular_vectors(shifted, d);
    auto [left, left_sv] = linalg::smallest_right_singular_vectors(shifted.adjoint(), d);
    if (right_sv > defect || left_sv > defect) {
      std::ostringstream msg;
      msg << "peripheral eigenvalue " << c.lambda << " with algebraic multiplicity " << d
          << " has a deficient eigenspace (singular value " << std::max(right_sv, left_sv)
          << "); the map has nontrivial peripheral Jordan structure";
      throw TheoremViolation(msg.str());
    }
    right = linalg::canonical_basis(right);
    const Matrix gram = left.adjoint() * right;
    const Eigen::JacobiSVD<Matrix> gram_svd(gram);
    const auto& gs = gram_svd.singularValues();
    if (gs(gs.size() - 1) <= tol.rank * std::max(1.0, gs(0))) {
      std::ostringstream msg;
      msg << "cluster Gram matrix at lambda = " << c.lambda << " is singular; eigenvalues misclustered";
      throw NumericalError(msg.str());
    }
    const Matrix duals = left * gram.inverse().adjoint();

    PeripheralCluster cluster;
    cluster.lambda = c.lambda;
    cluster.phase = c.phase;
    cluster.multiplicity = static_cast<int>(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      cluster.indices.push_back(data.eigenvalues.size());
      data.eigenvalues.push_back(values(c.members[static_cast<std::size_t>(k)]));
      data.right_vectors.push_back(devectorize(right.col(k), n));
      left_peripheral.push_back(devectorize(duals.col(k), n));
    }
    data.peripheral_clusters.push_back(std::move(cluster));
  }
  for (Eigen::Index i : decaying) {
    data.eigenvalues.push_back(values(i));
    Vector v = solver.eigenvectors().col(i);
    v.normalize();
    linalg::fix_phase(v);
    data.right_vectors.push_back(devectorize(v, n));
  }

  data.left_vectors = left_peripheral;
  const Matrix all_right = detail::operators_to_columns(data.right_vectors, n);
  const Eigen::JacobiSVD<Matrix> cond_svd(all_right);
  const auto& cs = cond_svd.singularValues();
  if (cs(cs.size() - 1) > 1e-10 * cs(0)) {
    const Matrix inv = all_right.inverse();
    for (std::size_t i = data.peripheral_count(); i < data.eigenvalues.size(); ++i)
      data.left_vectors.push_back(devectorize(inv.row(static_cast<Eigen::Index>(i)).adjoint(), n));
    data.decaying_left_available = true;
  }
  return data;
}

inline SpectralData full_spectrum(const KrausMap& map, const Tolerances& tol = {}) {
  return full_spectrum(map.superoperator(), tol);
}

/// Largest eigenvalue modulus of the superoperator.
inline double spectral_radius(const Superoperator& sop) {
  return detail::eigenvalues_only(sop).cwiseAbs().maxCoeff();
}

struct PeripheralEigenvalue {
  Complex lambda;
  int multiplicity = 0;
};

/// Unit-modulus eigenvalues with multiplicities. Refuses maps that are not
/// trace non-increasing, and throws TheoremViolation when some eigenvalue
/// exceeds 1 + tol.peripheral in modulus.
inline std::vector<PeripheralEigenvalue> peripheral_spectrum(const KrausMap& map, const Tolerances& tol = {}) {
  detail::require(classify(map, tol.positivity).trace_nonincreasing,
                  "peripheral_spectrum: map is not trace non-increasing");
  const SpectralData data = full_spectrum(map, tol);
  const double radius = data.spectral_radius();
  if (radius > 1.0 + tol.peripheral) {
    std::ostringstream msg;
    msg << "spectral radius " << radius << " exceeds 1 for a trace non-increasing map";
    throw TheoremViolation(msg.str());
  }
  std::vector<PeripheralEigenvalue> out;
  for (const auto& c : data.peripheral_clusters) out.push_back({c.lambda, c.multiplicity});
  return out;
}

/// HS-orthonormal canonical basis of Ker(P - lambda I).
inline SubspaceBasis eigenspace_basis(const Superoperator& sop, Complex lambda, const Tolerances& tol = {}) {
  detail::require_near_eigenvalue(sop, lambda, tol.peripheral);
  const Matrix kernel = linalg::null_space(detail::shifted(sop, lambda), tol.rank);
  if (kernel.cols() == 0) {
    std::ostringstream msg;
    msg << "eigenspace at lambda = " << lambda << " is numerically empty at rank tolerance " << tol.rank;
    throw NumericalError(msg.str());
  }
  SubspaceBasis basis;
  basis.orthonormal_under = InnerProduct::hs;
  basis.elements = detail::columns_to_operators(linalg::canonical_basis(kernel), sop.dim());
  const double bound = 10.0 * tol.rank * std::max(1.0, sop.matrix().norm());
  for (const Operator& x : basis.elements) {
    if (hs_norm(sop.apply(x) - lambda * x) > bound * hs_norm(x))
      throw NumericalError("eigenspace_basis: residual above tolerance");
  }
  return basis;
}

inline SubspaceBasis eigenspace_basis(const KrausMap& map, Complex lambda, const Tolerances& tol = {}) {
  return eigenspace_basis(map.superoperator(), lambda, tol);
}

/// HS-orthonormal basis of Ran(P - lambda I).
inline SubspaceBasis range_basis(const Superoperator& sop, Complex lambda, const Tolerances& tol = {}) {
  SubspaceBasis basis;
  basis.orthonormal_under = InnerProduct::hs;
  basis.elements = detail::columns_to_operators(linalg::column_space(detail::shifted(sop, lambda), tol.rank), sop.dim());
  return basis;
}

inline SubspaceBasis range_basis(const KrausMap& map, Complex lambda, const Tolerances& tol = {}) {
  return range_basis(map.superoperator(), lambda, tol);
}

struct KernelRangeDims {
  Eigen::Index kernel = 0;
  Eigen::Index range = 0;
  Eigen::Index intersection = 0;
};

/// Dimensions of Ker(P - lambda I), Ran(P - lambda I) and their
/// intersection, the latter from dim K + dim R - rank [K R].
inline KernelRangeDims kernel_range_dims(const Superoperator& sop, Complex lambda, const Tolerances& tol = {}) {
  const Matrix shifted = detail::shifted(sop, lambda);
  const Matrix kernel = linalg::null_space(shifted, tol.rank);
  const Matrix range = linalg::column_space(shifted, tol.rank);
  Matrix joined(shifted.rows(), kernel.cols() + range.cols());
  joined << kernel, range;
  KernelRangeDims dims;
  dims.kernel = kernel.cols();
  dims.range = range.cols();
  dims.intersection = dims.kernel + dims.range - linalg::numerical_rank(joined, tol.rank);
  return dims;
}

inline Eigen::Index ker_ran_intersection_dim(const Superoperator& sop, Complex lambda, const Tolerances& tol = {}) {
  return kernel_range_dims(sop, lambda, tol).intersection;
}

inline Eigen::Index ker_ran_intersection_dim(const KrausMap& map, Complex lambda, const Tolerances& tol = {}) {
  return ker_ran_intersection_dim(map.superoperator(), lambda, tol);
}

}  // namespace qmarkov
