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

// Shared fixtures for the test suites: random operators, direct-loop
// oracles that avoid the library's superoperator path, and a zoo of unital
// channels with known peripheral structure.

#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/QR>

#include "qmarkov/qmarkov.hpp"

namespace qmarkov::testing {

using Rng = std::mt19937_64;

inline Operator random_operator(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> g;
  Operator x(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) x(i, j) = Complex(g(rng), g(rng));
  return x;
}

inline Operator random_hermitian(Eigen::Index dim, Rng& rng) {
  const Operator a = random_operator(dim, rng);
  return 0.5 * (a + a.adjoint());
}

/// Full-rank density matrix.
inline Operator random_state(Eigen::Index dim, Rng& rng) {
  const Operator a = random_operator(dim, rng);
  const Operator rho = a * a.adjoint() + 0.05 * identity(dim);
  return rho / rho.trace().real();
}

inline Operator random_unitary(Eigen::Index dim, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_operator(dim, rng));
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < dim; ++j) q.col(j) *= std::polar(1.0, -std::arg(r(j, j)));
  return q;
}

/// sum_j A_j X A_j^dagger by explicit index loops.
inline Operator loop_apply(const KrausMap& map, const Operator& x) {
  const Eigen::Index n = map.dim();
  Operator out = Operator::Zero(n, n);
  for (const Operator& a : map.kraus())
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index l = 0; l < n; ++l) {
        Complex s = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
          for (Eigen::Index q = 0; q < n; ++q) s += a(i, p) * x(p, q) * std::conj(a(l, q));
        out(i, l) += s;
      }
  return out;
}

inline Operator loop_adjoint_apply(const KrausMap& map, const Operator& x) {
  const Eigen::Index n = map.dim();
  Operator out = Operator::Zero(n, n);
  for (const Operator& a : map.kraus())
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index l = 0; l < n; ++l) {
        Complex s = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
          for (Eigen::Index q = 0; q < n; ++q) s += std::conj(a(p, i)) * x(p, q) * a(q, l);
        out(i, l) += s;
      }
  return out;
}

/// n successive Kraus applications.
inline Operator loop_iterate(const KrausMap& map, Operator x, long long n) {
  for (long long k = 0; k < n; ++k) {
    Operator next = Operator::Zero(x.rows(), x.cols());
    for (const Operator& a : map.kraus()) next += a * x * a.adjoint();
    x = std::move(next);
  }
  return x;
}

inline KrausMap bit_flip(double p) {
  return KrausMap({std::sqrt(1.0 - p) * identity(2), std::sqrt(p) * pauli_x()});
}

/// The qubit transpose X -> X^T as a raw superoperator.
inline Superoperator transpose_superoperator(Eigen::Index dim = 2) {
  Matrix s = Matrix::Zero(dim * dim, dim * dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) s(i * dim + j, j * dim + i) = 1.0;
  return Superoperator(dim, s);
}

/// Orthonormal columns spanning the same space as `columns`.
inline Matrix orthonormal_columns(const Matrix& columns) {
  return linalg::column_space(columns, 1e-9);
}

/// Largest principal angle (radians) between two equal-dimensional spans.
inline double max_principal_angle(const Matrix& a, const Matrix& b) {
  const Matrix qa = orthonormal_columns(a);
  const Matrix qb = orthonormal_columns(b);
  if (qa.cols() != qb.cols()) return std::numbers::pi / 2;
  if (qa.cols() == 0) return 0.0;
  const Eigen::JacobiSVD<Matrix> svd(qa.adjoint() * qb);
  const double smallest = std::min(1.0, svd.singularValues().minCoeff());
  return std::acos(smallest);
}

inline Matrix stack(std::span<const Operator> ops) {
  Matrix m(ops.front().size(), static_cast<Eigen::Index>(ops.size()));
  for (std::size_t k = 0; k < ops.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = vectorize(ops[k]);
  return m;
}

// ---------------------------------------------------------------------------
// Unital zoo

enum class UnitalFamily { mixture, block, phase_sector, single_unitary };

struct UnitalCase {
  UnitalFamily family;
  KrausMap map;
};

inline KrausMap mixture_of(const std::vector<Operator>& unitaries, Rng& rng) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<double> w;
  for (std::size_t k = 0; k < unitaries.size(); ++k) w.push_back(u(rng));
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return random_unitary_channel(w, unitaries);
}

inline Operator block_diag(const Operator& a, const Operator& b) {
  Operator out = Operator::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

/// Case `index` cycles through the four families; dims vary in 2..4.
inline UnitalCase unital_case(int index, std::uint64_t seed) {
  Rng rng(seed);
  const auto family = static_cast<UnitalFamily>(index % 4);
  std::vector<Operator> unitaries;
  switch (family) {
    case UnitalFamily::mixture: {
      const Eigen::Index n = 2 + (index / 4) % 3;
      const int count = 2 + (index / 4) % 2;
      for (int k = 0; k < count; ++k) unitaries.push_back(random_unitary(n, rng));
      break;
    }
    case UnitalFamily::block: {
      // Commutant span{Q1, Q2} in a random basis.
      const Eigen::Index n = 3 + (index / 4) % 2;
      const Operator w = random_unitary(n, rng);
      for (int k = 0; k < 3; ++k)
        unitaries.push_back(w * block_diag(random_unitary(1, rng), random_unitary(n - 1, rng)) * w.adjoint());
      break;
    }
    case UnitalFamily::phase_sector: {
      // U_k = W (D (x) V_k) W^dagger with D = diag(e^{i theta}, 1): peripheral e^{+-i theta}.
      const Eigen::Index half = 1 + (index / 4) % 2;
      std::uniform_real_distribution<double> angle(0.4, 2 * std::numbers::pi - 0.4);
      Operator d = Operator::Identity(2, 2);
      d(0, 0) = std::polar(1.0, angle(rng));
      const Operator w = random_unitary(2 * half, rng);
      for (int k = 0; k < 3; ++k) unitaries.push_back(w * linalg::kron(d, random_unitary(half, rng)) * w.adjoint());
      break;
    }
    case UnitalFamily::single_unitary: {
      const Eigen::Index n = 2 + (index / 4) % 2;
      return {family, unitary_channel(random_unitary(n, rng))};
    }
  }
  return {family, mixture_of(unitaries, rng)};
}

}  // namespace qmarkov::testing
