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

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qmarkov/qmarkov.hpp"

namespace qmarkov::cli {

enum class Command { analyze, evolve, verify, generate };

/// Everything one invocation needs. Paths left empty are absent.
struct RunConfig {
  Command command = Command::analyze;
  std::string channel_path;
  std::string state_path;
  std::string rho_path;
  /// Directory for analyze/evolve/verify reports; file for generate (stdout
  /// when empty).
  std::string out_path;
  Tolerances tol;
  std::vector<long long> ns;
  std::uint64_t seed = 0;

  // generate
  std::string kind;
  Eigen::Index dim = 2;
  Eigen::Index kraus_count = 2;
  double param = 0.0;
  double shrink = 1.0;
  std::string unitary_path;
  std::vector<double> weights;
  std::string unitaries_path;
};

enum ExitStatus : int { kOk = 0, kPrecondition = 1, kTheoremViolation = 2 };

namespace detail {

inline void validate(const RunConfig& config) {
  qmarkov::detail::require(config.tol.peripheral > 0.0, "--tol-peripheral must be positive");
  qmarkov::detail::require(config.tol.rank > 0.0, "--tol-rank must be positive");
  qmarkov::detail::require(config.tol.positivity > 0.0, "--tol-positivity must be positive");
  if (config.command != Command::generate)
    qmarkov::detail::require(!config.channel_path.empty(), "--channel is required");
  if (config.command == Command::evolve) qmarkov::detail::require(!config.ns.empty(), "evolve needs --n or --ns");
}

inline std::string format(Complex z) {
  std::ostringstream s;
  s << std::setprecision(6) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return s.str();
}

inline std::filesystem::path out_dir(const RunConfig& config) {
  std::filesystem::path dir(config.out_path);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw PreconditionError("cannot create output directory '" + config.out_path + "': " + ec.message());
  return dir;
}

inline KrausMap load_channel(const RunConfig& config) { return io::channel_from_json(io::read_json_file(config.channel_path)); }

inline const char* yes_no(bool b) { return b ? "yes" : "no"; }

inline void print_classification(const ChannelClassification& c, std::ostream& out) {
  out << "trace preserving: " << yes_no(c.trace_preserving) << ", trace non-increasing: " << yes_no(c.trace_nonincreasing)
      << ", unital: " << yes_no(c.unital) << ", sub-unital: " << yes_no(c.subunital) << "\n";
}

inline void print_peripheral(const SpectralData& spectrum, std::ostream& out) {
  out << "peripheral spectrum:";
  for (const PeripheralCluster& c : spectrum.peripheral_clusters)
    out << " (" << format(c.lambda) << ", d=" << c.multiplicity << ")";
  out << "\n";
}

inline double max_eigen_residual(const KrausMap& map, const AttractorBasis& basis) {
  double worst = 0.0;
  for (const AttractorEntry& e : basis.entries)
    worst = std::max(worst, hs_norm(map.apply(e.x) - e.lambda * e.x) / hs_norm(e.x));
  return worst;
}

// ---------------------------------------------------------------------------

inline int analyze(const RunConfig& config, std::ostream& out) {
  const KrausMap map = load_channel(config);
  const ChannelClassification cls = classify(map, config.tol.positivity);
  out << "channel: dim " << map.dim() << ", " << map.size() << " Kraus operators\n";
  print_classification(cls, out);
  const SpectralData spectrum = full_spectrum(map, config.tol);
  print_peripheral(spectrum, out);
  out << "spectral radius: " << std::setprecision(12) << spectrum.spectral_radius()
      << ", subperipheral modulus q: " << spectrum.subperipheral_modulus() << "\n";

  io::Json spectrum_json = io::spectrum_report(spectrum);
  std::optional<io::Json> attractor_json;
  std::optional<io::Json> state_json;
  int status = kOk;
  const bool radius_violation = cls.trace_nonincreasing && spectrum.spectral_radius() > 1.0 + config.tol.peripheral;
  if (radius_violation) {
    out << "THEOREM VIOLATION: spectral radius exceeds 1 for a trace non-increasing map; further analysis skipped\n";
    status = kTheoremViolation;
  } else if (cls.trace_nonincreasing) {
    const AttractorBasis basis = attractor_basis(spectrum);
    const double bio = biorthonormality_deviation(basis);
    const double eig = max_eigen_residual(map, basis);
    out << "attractor dimension: " << basis.size() << " (biorthonormality deviation " << std::setprecision(3) << bio
        << ", eigen residual " << eig << ")\n";
    attractor_json = io::attractor_report(basis, io::Json{{"biorthonormality", bio}, {"eigen_residual", eig}});
  } else {
    out << "map is not trace non-increasing; attractor analysis skipped\n";
  }
  if (cls.trace_preserving && !radius_violation) {
    const InvariantStateResult state = find_invariant_state(map, 1e-13, config.tol);
    out << "invariant state: residual " << std::setprecision(3) << state.residual << ", support dim "
        << state.support_dim << ", strictly positive: " << yes_no(state.strictly_positive) << "\n";
    if (!state.converged) {
      out << "THEOREM VIOLATION: Cesaro average did not converge\n";
      status = kTheoremViolation;
    }
    state_json = io::invariant_state_report(state);
  }
  if (!config.out_path.empty()) {
    const auto dir = out_dir(config);
    io::write_json_file((dir / "spectrum.json").string(), spectrum_json);
    if (attractor_json) io::write_json_file((dir / "attractor.json").string(), *attractor_json);
    if (state_json) io::write_json_file((dir / "invariant_state.json").string(), *state_json);
  }
  return status;
}

inline int evolve(const RunConfig& config, std::ostream& out) {
  const KrausMap map = load_channel(config);
  const Eigen::Index n = map.dim();
  const Operator x0 = config.state_path.empty()
                          ? Operator(identity(n) / static_cast<double>(n))
                          : io::state_from_json(io::read_json_file(config.state_path), n, "state");
  const AsymptoticModel model = build_model(map, x0, config.tol);
  const std::vector<ConvergencePoint> points = convergence_report(map, model, config.ns);
  out << "attractor dimension " << model.basis.size() << ", subperipheral modulus q " << std::setprecision(12)
      << model.subperipheral_gap << "\n";
  out << "n, distance\n";
  for (const ConvergencePoint& p : points) out << p.n << ", " << std::setprecision(6) << p.distance << "\n";
  if (!config.out_path.empty()) {
    const auto dir = out_dir(config);
    io::write_text_file((dir / "convergence.csv").string(), io::convergence_csv(points));
    io::Json states = io::Json::array();
    for (long long k : config.ns) states.push_back(io::Json{{"n", k}, {"state", io::matrix_to_json(asymptotic_state(model, k))}});
    io::write_json_file((dir / "asymptotic_states.json").string(),
                        io::Json{{"subperipheral_gap", model.subperipheral_gap}, {"states", std::move(states)}});
  }
  return kOk;
}

struct PropertyCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

inline int verify(const RunConfig& config, std::ostream& out) {
  const KrausMap original = load_channel(config);
  const Tolerances& tol = config.tol;
  const ChannelClassification cls = classify(original, tol.positivity);
  qmarkov::detail::require(cls.trace_nonincreasing, "verify: map is not trace non-increasing");

  // Select the map and the strictly positive subinvariant state to verify with.
  std::optional<KrausMap> map;
  Operator rho;
  std::string source;
  const Eigen::Index n = original.dim();
  if (!config.rho_path.empty()) {
    rho = io::state_from_json(io::read_json_file(config.rho_path), n, "rho");
    qmarkov::detail::require(positivity_report(rho, tol.positivity).is_strictly_positive,
                             "rho: not strictly positive");
    qmarkov::detail::require(check_subinvariant(original, rho, tol.positivity),
                             "rho: not subinvariant (P(rho) <= rho fails)");
    map = original;
    source = "user";
  } else if (check_subinvariant(original, identity(n) / static_cast<double>(n), tol.positivity)) {
    rho = identity(n) / static_cast<double>(n);
    map = original;
    source = "maximally_mixed";
  } else if (cls.trace_preserving) {
    const InvariantStateResult fixed = find_invariant_state(original, 1e-13, tol);
    if (fixed.strictly_positive) {
      rho = fixed.state;
      map = original;
      source = "invariant_state";
    } else {
      const ReducedChannel reduced = recurrent_subspace(original, tol);
      rho = reduced.compress(*reduced.state);
      map = reduced.reduced_map;
      source = "recurrent_subspace";
      out << "no strictly positive invariant state; verifying on the recurrent subspace (dimension "
          << reduced.isometry.cols() << ")\n";
    }
  } else {
    throw PreconditionError("verify: no strictly positive subinvariant state found; supply one with --rho");
  }

  const SpectralData spectrum = full_spectrum(*map, tol);
  const AttractorBasis basis = attractor_basis(spectrum);
  const StructureEquationReport structure = verify_structure(*map, rho, basis, tol);
  const bool fixed_point = hs_norm(map->apply(rho) - rho) <= 1e-8;

  std::vector<PropertyCheck> checks;
  const auto add = [&](std::string name, double value, double threshold) {
    checks.push_back({std::move(name), value, threshold, value <= threshold});
  };
  add("spectral_radius_excess", std::max(0.0, spectral_radius(original.superoperator()) - 1.0), 1e-8);
  Eigen::Index worst_intersection = 0;
  Eigen::Index worst_count_gap = 0;
  for (const PeripheralCluster& c : spectrum.peripheral_clusters) {
    const KernelRangeDims dims = kernel_range_dims(map->superoperator(), c.lambda, tol);
    worst_intersection = std::max(worst_intersection, dims.intersection);
    worst_count_gap = std::max(worst_count_gap, std::abs(dims.kernel + dims.range - map->dim() * map->dim()));
  }
  add("peripheral_ker_ran_intersection_dim", static_cast<double>(worst_intersection), 0.0);
  add("peripheral_ker_plus_ran_dim_gap", static_cast<double>(worst_count_gap), 0.0);
  add("dual_biorthonormality", biorthonormality_deviation(basis), 1e-8);
  double idempotency = 0.0;
  for (const Operator& s : spanning_states(map->dim())) {
    const Operator once = attractor_projector(basis, s);
    idempotency = std::max(idempotency, hs_norm(attractor_projector(basis, once) - once));
  }
  add("projector_idempotency", idempotency, 1e-9);
  add("choi_negativity", std::max(0.0, -choi_min_eigenvalue(original.superoperator())), tol.positivity);
  add("structure_max_residual", structure.max_residual, 1e-8);
  Eigen::Index dim_gap = 0;
  for (std::size_t i = 0; i < structure.kernel_dims.size(); ++i) {
    const Eigen::Index gap = structure.algebraic_dims[i] - structure.kernel_dims[i];
    // Without P(rho) = rho only the inclusion Ker <= D is guaranteed.
    dim_gap = std::max(dim_gap, fixed_point ? std::abs(gap) : std::max<Eigen::Index>(0, -gap));
  }
  add("algebraic_kernel_dim_gap", static_cast<double>(dim_gap), 0.0);

  bool all = true;
  out << "rho source: " << source << (fixed_point ? " (fixed point)" : " (subinvariant)") << "\n";
  for (const PropertyCheck& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " = " << std::setprecision(3) << c.value << " (threshold "
        << c.threshold << ")\n";
    all = all && c.passed;
  }
  out << (all ? "all structural properties hold\n" : "THEOREM VIOLATION: some properties failed\n");

  if (!config.out_path.empty()) {
    io::Json props = io::Json::array();
    for (const PropertyCheck& c : checks)
      props.push_back(io::Json{{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"passed", c.passed}});
    const auto dir = out_dir(config);
    io::write_json_file((dir / "verify.json").string(), io::Json{{"rho_source", source},
                                                                 {"rho", io::matrix_to_json(rho)},
                                                                 {"structure", io::structure_report(structure)},
                                                                 {"properties", std::move(props)},
                                                                 {"passed", all}});
  }
  return all ? kOk : kTheoremViolation;
}

// "I,X,Z" style lists; anything else is treated as a file path.
inline std::optional<std::vector<Operator>> pauli_list(const std::string& text) {
  std::vector<Operator> out;
  std::stringstream stream(text);
  std::string name;
  while (std::getline(stream, name, ',')) {
    if (name == "I") out.push_back(identity(2));
    else if (name == "X") out.push_back(pauli_x());
    else if (name == "Y") out.push_back(pauli_y());
    else if (name == "Z") out.push_back(pauli_z());
    else return std::nullopt;
  }
  if (out.empty()) return std::nullopt;
  return out;
}

inline ChannelSpec generator_spec(const RunConfig& config) {
  const std::string& kind = config.kind;
  if (kind == "identity") return channels::Identity{config.dim};
  if (kind == "unitary") {
    qmarkov::detail::require(!config.unitary_path.empty(), "generate unitary: --unitary FILE is required");
    return channels::Unitary{io::matrix_from_json(io::read_json_file(config.unitary_path), "unitary")};
  }
  if (kind == "random_unitary") {
    qmarkov::detail::require(!config.unitaries_path.empty(), "generate random_unitary: --unitaries FILE is required");
    channels::RandomUnitary spec;
    spec.weights = config.weights;
    if (auto paulis = pauli_list(config.unitaries_path)) {
      spec.unitaries = std::move(*paulis);
      return spec;
    }
    const io::Json list = io::read_json_file(config.unitaries_path);
    if (!list.is_array()) throw PreconditionError("unitaries: expected a list of matrices");
    for (std::size_t i = 0; i < list.size(); ++i)
      spec.unitaries.push_back(io::matrix_from_json(list[i], "unitaries[" + std::to_string(i) + "]"));
    return spec;
  }
  if (kind == "amplitude_damping") return channels::AmplitudeDamping{config.param};
  if (kind == "depolarizing") return channels::Depolarizing{config.param, config.dim};
  if (kind == "phase_damping") return channels::PhaseDamping{config.param};
  if (kind == "random_cptp") return channels::RandomCptp{config.dim, config.kraus_count, config.seed};
  if (kind == "random_cptni") return channels::RandomCptni{config.dim, config.kraus_count, config.seed, config.shrink};
  throw PreconditionError("--kind: unknown channel kind '" + kind + "'");
}

inline int generate(const RunConfig& config, std::ostream& out) {
  const KrausMap map = make_standard_channel(generator_spec(config));
  const std::string text = io::channel_to_json(map).dump(2) + "\n";
  if (config.out_path.empty()) {
    out << text;
  } else {
    const std::filesystem::path target(config.out_path);
    if (target.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(target.parent_path(), ec);
    }
    io::write_text_file(config.out_path, text);
    out << "wrote " << config.kind << " channel (dim " << map.dim() << ", " << map.size() << " Kraus operators) to "
        << config.out_path << "\n";
  }
  return kOk;
}

}  // namespace detail

/// Runs one command. Human-readable output goes to `out`, diagnostics to
/// `err`; JSON/CSV reports are written under config.out_path. Returns 0 on
/// success, 1 on precondition or input errors, 2 when a structural property
/// fails beyond tolerance.
inline int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    detail::validate(config);
    switch (config.command) {
      case Command::analyze:
        return detail::analyze(config, out);
      case Command::evolve:
        return detail::evolve(config, out);
      case Command::verify:
        return detail::verify(config, out);
      case Command::generate:
        return detail::generate(config, out);
    }
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kPrecondition;
  } catch (const TheoremViolation& e) {
    err << "theorem violation: " << e.what() << "\n";
    return kTheoremViolation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kTheoremViolation;
  }
  return kPrecondition;
}

}  // namespace qmarkov::cli
