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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qmarkov/asymptotics.hpp"
#include "qmarkov/attractor.hpp"
#include "qmarkov/channel.hpp"
#include "qmarkov/errors.hpp"
#include "qmarkov/invariants.hpp"
#include "qmarkov/operator_space.hpp"
#include "qmarkov/spectral.hpp"

namespace qmarkov::io {

using Json = nlohmann::json;

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw PreconditionError(field + ": expected a complex number [re, im]");
  const Complex z(j[0].get<double>(), j[1].get<double>());
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw PreconditionError(field + ": non-finite entry");
  return z;
}

/// A matrix is a list of rows; each entry is [re, im].
inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw PreconditionError(field + ": expected a non-empty list of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw PreconditionError(field + "[0]: expected a non-empty row");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::string row_field = field + "[" + std::to_string(r) + "]";
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array()) throw PreconditionError(row_field + ": expected a row (list of entries)");
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw PreconditionError(row_field + ": has " + std::to_string(row.size()) + " entries, expected " +
                              std::to_string(cols));
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)], row_field + "[" + std::to_string(c) + "]");
  }
  return m;
}

inline Operator operator_from_json(const Json& j, Eigen::Index dim, const std::string& field) {
  Matrix m = matrix_from_json(j, field);
  if (m.rows() != dim || m.cols() != dim)
    throw PreconditionError(field + ": expected a " + std::to_string(dim) + "x" + std::to_string(dim) +
                            " matrix, got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  return m;
}

inline Json channel_to_json(const KrausMap& map) {
  Json kraus = Json::array();
  for (const Operator& a : map.kraus()) kraus.push_back(matrix_to_json(a));
  return Json{{"dim", map.dim()}, {"kraus", std::move(kraus)}};
}

inline KrausMap channel_from_json(const Json& j) {
  if (!j.is_object()) throw PreconditionError("channel: expected a JSON object with \"dim\" and \"kraus\"");
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long long>() <= 0)
    throw PreconditionError("channel.dim: expected a positive integer");
  const auto dim = static_cast<Eigen::Index>(j["dim"].get<long long>());
  if (!j.contains("kraus") || !j["kraus"].is_array() || j["kraus"].empty())
    throw PreconditionError("channel.kraus: expected a non-empty list of matrices");
  std::vector<Operator> kraus;
  for (std::size_t i = 0; i < j["kraus"].size(); ++i)
    kraus.push_back(operator_from_json(j["kraus"][i], dim, "channel.kraus[" + std::to_string(i) + "]"));
  return KrausMap(std::move(kraus));
}

/// An operator file holds either a bare matrix or an object with a "state"
/// matrix (as written in invariant-state reports).
inline Operator state_from_json(const Json& j, Eigen::Index dim, const std::string& field) {
  if (j.is_object()) {
    if (!j.contains("state")) throw PreconditionError(field + ": object has no \"state\" matrix");
    return operator_from_json(j["state"], dim, field + ".state");
  }
  return operator_from_json(j, dim, field);
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot read file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw PreconditionError("malformed JSON in '" + path + "': " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write file '" + path + "'");
  out << text;
  if (!out) throw PreconditionError("failed writing file '" + path + "'");
}

inline void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// Reports.

inline Json spectrum_report(const SpectralData& data) {
  Json eigenvalues = Json::array();
  for (const Complex& z : data.eigenvalues) eigenvalues.push_back(complex_to_json(z));
  Json peripheral = Json::array();
  for (const PeripheralCluster& c : data.peripheral_clusters)
    peripheral.push_back(Json{{"lambda", complex_to_json(c.lambda)}, {"multiplicity", c.multiplicity}});
  return Json{{"eigenvalues", std::move(eigenvalues)}, {"peripheral", std::move(peripheral)}};
}

inline Json attractor_report(const AttractorBasis& basis, Json residuals = Json::object()) {
  Json entries = Json::array();
  for (const AttractorEntry& e : basis.entries)
    entries.push_back(Json{{"lambda", complex_to_json(e.lambda)},
                           {"X", matrix_to_json(e.x)},
                           {"X_dual", matrix_to_json(e.dual)}});
  return Json{{"entries", std::move(entries)}, {"route", to_string(basis.route)}, {"residuals", std::move(residuals)}};
}

inline Json invariant_state_report(const InvariantStateResult& result) {
  return Json{{"state", matrix_to_json(result.state)},
              {"residual", result.residual},
              {"support_dim", result.support_dim},
              {"strictly_positive", result.strictly_positive}};
}

inline Json structure_report(const StructureEquationReport& r) {
  return Json{{"adjoint_right", r.adjoint_right},
              {"adjoint_left", r.adjoint_left},
              {"similarity", r.similarity},
              {"kernel_range_orthogonality", r.kernel_range_orthogonality},
              {"eigenspace_orthogonality", r.eigenspace_orthogonality},
              {"kraus_equations", r.kraus_equations},
              {"kraus_rho2", r.kraus_rho2},
              {"algebraic_dims", r.algebraic_dims},
              {"kernel_dims", r.kernel_dims},
              {"dimension_match", r.dimension_match},
              {"max_residual", r.max_residual}};
}

/// Header "n,distance", one row per point, distances with 17 significant digits.
inline std::string convergence_csv(std::span<const ConvergencePoint> points) {
  std::ostringstream out;
  out << "n,distance\n";
  char buffer[64];
  for (const ConvergencePoint& p : points) {
    std::snprintf(buffer, sizeof buffer, "%.17g", p.distance);
    out << p.n << ',' << buffer << '\n';
  }
  return out.str();
}

}  // namespace qmarkov::io
