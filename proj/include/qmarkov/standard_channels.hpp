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
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qmarkov/channel.hpp"
#include "qmarkov/errors.hpp"
#include "qmarkov/operator_space.hpp"

namespace qmarkov {

namespace detail {

inline void require_unit_interval(double value, const char* name) {
  require(std::isfinite(value) && value >= 0.0 && value <= 1.0,
          std::string(name) + " must lie in [0, 1], got " + std::to_string(value));
}

inline bool is_unitary(const Operator& u, double tol) {
  return (u.adjoint() * u - identity(u.rows())).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace detail

/// Complex Ginibre matrix with standard normal real and imaginary parts.
template <class Rng>
Matrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = Complex(normal(rng), normal(rng));
  return g;
}

/// Haar-distributed isometry (rows x cols, rows >= cols): QR of a Ginibre
/// matrix with the phases of R's diagonal absorbed into Q.
template <class Rng>
Matrix haar_isometry(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  detail::require(rows >= cols && cols > 0, "haar_isometry: need rows >= cols > 0");
  const Eigen::HouseholderQR<Matrix> qr(ginibre(rows, cols, rng));
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix r = qr.matrixQR().topRows(cols).template triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0.0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

template <class Rng>
Operator haar_unitary(Eigen::Index dim, Rng& rng) {
  return haar_isometry(dim, dim, rng);
}

// ---------------------------------------------------------------------------
// Named families.

inline KrausMap identity_channel(Eigen::Index dim) {
  detail::require(dim > 0, "dim must be positive");
  return KrausMap({identity(dim)});
}

inline KrausMap unitary_channel(const Operator& u, double tol = 1e-10) {
  validate_operator(u, "unitary");
  detail::require(detail::is_unitary(u, tol), "unitary: matrix is not unitary");
  return KrausMap({u});
}

/// X -> sum_j w_j U_j X U_j^dagger.
inline KrausMap random_unitary_channel(std::span<const double> weights, std::span<const Operator> unitaries,
                                       double tol = 1e-10) {
  detail::require(!weights.empty() && weights.size() == unitaries.size(),
                  "random_unitary: weights and unitaries must be non-empty and of equal length");
  double total = 0.0;
  for (double w : weights) {
    detail::require(std::isfinite(w) && w >= 0.0, "random_unitary: weights must be nonnegative");
    total += w;
  }
  detail::require(std::abs(total - 1.0) <= tol, "random_unitary: weights must sum to 1");
  std::vector<Operator> kraus;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    validate_operator(unitaries[j], "unitaries[" + std::to_string(j) + "]");
    detail::require(detail::is_unitary(unitaries[j], tol),
                    "unitaries[" + std::to_string(j) + "]: matrix is not unitary");
    kraus.push_back(std::sqrt(weights[j]) * unitaries[j]);
  }
  return KrausMap(std::move(kraus));
}

/// Qubit decay |1> -> |0> with probability gamma.
inline KrausMap amplitude_damping(double gamma) {
  detail::require_unit_interval(gamma, "gamma");
  Operator a0 = Operator::Zero(2, 2);
  a0(0, 0) = 1.0;
  a0(1, 1) = std::sqrt(1.0 - gamma);
  Operator a1 = Operator::Zero(2, 2);
  a1(0, 1) = std::sqrt(gamma);
  return KrausMap({a0, a1});
}

/// X -> (1 - p) X + p Tr(X) I/dim, written with the dim^2 Weyl operators.
inline KrausMap depolarizing(double p, Eigen::Index dim = 2) {
  detail::require_unit_interval(p, "p");
  detail::require(dim > 0, "dim must be positive");
  const double n2 = static_cast<double>(dim * dim);
  const Complex omega = std::polar(1.0, 2.0 * std::numbers::pi / static_cast<double>(dim));
  std::vector<Operator> kraus;
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      const double weight = (a == 0 && b == 0) ? 1.0 - p + p / n2 : p / n2;
      if (weight == 0.0 && !(a == 0 && b == 0)) continue;
      Operator w = Operator::Zero(dim, dim);
      for (Eigen::Index k = 0; k < dim; ++k) w((k + a) % dim, k) = std::pow(omega, static_cast<double>(b * k));
      kraus.push_back(std::sqrt(weight) * w);
    }
  }
  return KrausMap(std::move(kraus));
}

/// Qubit dephasing: off-diagonal entries scale by sqrt(1 - lambda).
inline KrausMap phase_damping(double lambda) {
  detail::require_unit_interval(lambda, "lambda");
  Operator a0 = Operator::Zero(2, 2);
  a0(0, 0) = 1.0;
  a0(1, 1) = std::sqrt(1.0 - lambda);
  Operator a1 = Operator::Zero(2, 2);
  a1(1, 1) = std::sqrt(lambda);
  return KrausMap({a0, a1});
}

/// Random channel from a Haar isometry dim -> dim*kraus_count cut into
/// kraus_count blocks (Stinespring dilation).
inline KrausMap random_cptp(Eigen::Index dim, Eigen::Index kraus_count, std::uint64_t seed) {
  detail::require(dim > 0, "dim must be positive");
  detail::require(kraus_count > 0, "kraus count must be positive");
  std::mt19937_64 rng(seed);
  const Matrix v = haar_isometry(dim * kraus_count, dim, rng);
  std::vector<Operator> kraus;
  for (Eigen::Index j = 0; j < kraus_count; ++j) kraus.push_back(v.middleRows(j * dim, dim));
  return KrausMap(std::move(kraus));
}

/// random_cptp scaled so that P^dagger(I) = shrink * I.
inline KrausMap random_cptni(Eigen::Index dim, Eigen::Index kraus_count, std::uint64_t seed, double shrink) {
  detail::require(std::isfinite(shrink) && shrink > 0.0 && shrink <= 1.0, "shrink must lie in (0, 1]");
  const KrausMap base = random_cptp(dim, kraus_count, seed);
  std::vector<Operator> kraus;
  for (const Operator& a : base.kraus()) kraus.push_back(std::sqrt(shrink) * a);
  return KrausMap(std::move(kraus));
}

/// Block-diagonal map P1 (+) P2 on H1 (+) H2: X -> A X11 A^dagger (+) B X22 B^dagger.
/// Off-diagonal blocks are annihilated.
inline KrausMap direct_sum(const KrausMap& first, const KrausMap& second) {
  const Eigen::Index n1 = first.dim();
  const Eigen::Index n2 = second.dim();
  std::vector<Operator> kraus;
  for (const Operator& a : first.kraus()) {
    Operator k = Operator::Zero(n1 + n2, n1 + n2);
    k.topLeftCorner(n1, n1) = a;
    kraus.push_back(std::move(k));
  }
  for (const Operator& b : second.kraus()) {
    Operator k = Operator::Zero(n1 + n2, n1 + n2);
    k.bottomRightCorner(n2, n2) = b;
    kraus.push_back(std::move(k));
  }
  return KrausMap(std::move(kraus));
}

// ---------------------------------------------------------------------------
// Tagged description of a zoo member, used by the generator front end.

namespace channels {

struct Identity {
  Eigen::Index dim = 2;
};
struct Unitary {
  Operator u;
};
struct RandomUnitary {
  std::vector<double> weights;
  std::vector<Operator> unitaries;
};
struct AmplitudeDamping {
  double gamma = 0.0;
};
struct Depolarizing {
  double p = 0.0;
  Eigen::Index dim = 2;
};
struct PhaseDamping {
  double lambda = 0.0;
};
struct RandomCptp {
  Eigen::Index dim = 2;
  Eigen::Index kraus_count = 2;
  std::uint64_t seed = 0;
};
struct RandomCptni {
  Eigen::Index dim = 2;
  Eigen::Index kraus_count = 2;
  std::uint64_t seed = 0;
  double shrink = 1.0;
};

}  // namespace channels

using ChannelSpec = std::variant<channels::Identity, channels::Unitary, channels::RandomUnitary,
                                 channels::AmplitudeDamping, channels::Depolarizing, channels::PhaseDamping,
                                 channels::RandomCptp, channels::RandomCptni>;

inline KrausMap make_standard_channel(const ChannelSpec& spec) {
  struct Builder {
    KrausMap operator()(const channels::Identity& c) const { return identity_channel(c.dim); }
    KrausMap operator()(const channels::Unitary& c) const { return unitary_channel(c.u); }
    KrausMap operator()(const channels::RandomUnitary& c) const {
      return random_unitary_channel(c.weights, c.unitaries);
    }
    KrausMap operator()(const channels::AmplitudeDamping& c) const { return amplitude_damping(c.gamma); }
    KrausMap operator()(const channels::Depolarizing& c) const { return depolarizing(c.p, c.dim); }
    KrausMap operator()(const channels::PhaseDamping& c) const { return phase_damping(c.lambda); }
    KrausMap operator()(const channels::RandomCptp& c) const { return random_cptp(c.dim, c.kraus_count, c.seed); }
    KrausMap operator()(const channels::RandomCptni& c) const {
      return random_cptni(c.dim, c.kraus_count, c.seed, c.shrink);
    }
  };
  return std::visit(Builder{}, spec);
}

}  // namespace qmarkov
