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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "qmarkov/attractor.hpp"
#include "qmarkov/channel.hpp"
#include "qmarkov/errors.hpp"
#include "qmarkov/operator_space.hpp"
#include "qmarkov/spectral.hpp"
#include "qmarkov/tolerances.hpp"

namespace qmarkov {

struct AsymptoticCoefficient {
  Complex lambda;
  /// arg(lambda) in [0, 2 pi); lambda^n is evaluated as exp(i n phase).
  double phase = 0.0;
  /// Position in basis.entries.
  std::size_t entry = 0;
  /// Tr(dual^dagger X0).
  Complex value;
};

/// The asymptotic propagator of one initial operator.
struct AsymptoticModel {
  AttractorBasis basis;
  Operator x0;
  std::vector<AsymptoticCoefficient> coefficients;
  /// Largest eigenvalue modulus below the unit circle, 0 if there is none.
  double subperipheral_gap = 0.0;
};

inline AsymptoticModel build_model(const KrausMap& map, const SpectralData& spectrum, const Operator& x0) {
  detail::require(x0.rows() == map.dim() && x0.cols() == map.dim(), "build_model: X0 dimension mismatch");
  AsymptoticModel model;
  model.basis = attractor_basis(spectrum);
  model.x0 = x0;
  model.subperipheral_gap = spectrum.subperipheral_modulus();
  for (std::size_t a = 0; a < model.basis.size(); ++a) {
    const AttractorEntry& e = model.basis.entries[a];
    model.coefficients.push_back({e.lambda, detail::phase_of(e.lambda, spectrum.tol_peripheral), a,
                                  hs_inner(e.dual, x0)});
  }
  return model;
}

inline AsymptoticModel build_model(const KrausMap& map, const Operator& x0, const Tolerances& tol = {}) {
  validate_operator(x0, "X0");
  detail::require(classify(map, tol.positivity).trace_nonincreasing, "build_model: map is not trace non-increasing");
  return build_model(map, full_spectrum(map, tol), x0);
}

/// X_inf(n) = sum_a lambda_a^n x_a X_a. Peripheral eigenvalues carry unit
/// modulus exactly, so the result neither decays nor grows with n, and it is
/// bitwise n-independent when every phase is zero.
inline Operator asymptotic_state(const AsymptoticModel& model, long long n) {
  detail::require(n >= 0, "asymptotic_state: n must be nonnegative");
  Operator out = Operator::Zero(model.basis.dim, model.basis.dim);
  for (const AsymptoticCoefficient& c : model.coefficients) {
    const Complex power = std::polar(1.0, std::fmod(static_cast<double>(n) * c.phase, 2.0 * std::numbers::pi));
    out += (power * c.value) * model.basis.entries[c.entry].x;
  }
  return out;
}

struct ConvergencePoint {
  long long n = 0;
  double distance = 0.0;
};

/// ||P^n(X0) - X_inf(n)||_HS for each requested n, in the order given.
inline std::vector<ConvergencePoint> convergence_report(const KrausMap& map, const AsymptoticModel& model,
                                                        std::span<const long long> ns) {
  std::vector<long long> sorted(ns.begin(), ns.end());
  for (long long n : sorted) detail::require(n >= 0, "convergence_report: n must be nonnegative");
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> distance(sorted.size());
  Operator current = model.x0;
  long long at = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    current = iterate(map, current, sorted[i] - at);
    at = sorted[i];
    distance[i] = hs_norm(current - asymptotic_state(model, at));
  }
  std::vector<ConvergencePoint> out;
  for (long long n : ns) {
    const auto pos = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), n) - sorted.begin());
    out.push_back({n, distance[pos]});
  }
  return out;
}

inline std::vector<ConvergencePoint> convergence_report(const KrausMap& map, const Operator& x0,
                                                        std::span<const long long> ns, const Tolerances& tol = {}) {
  return convergence_report(map, build_model(map, x0, tol), ns);
}

}  // namespace qmarkov
