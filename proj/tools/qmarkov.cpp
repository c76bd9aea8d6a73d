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

#include <iostream>

#include "CLI11.hpp"
#include "qmarkov/cli/run.hpp"

namespace {

using qmarkov::cli::Command;
using qmarkov::cli::RunConfig;

void add_tolerances(CLI::App* app, RunConfig& config) {
  app->add_option("--tol-peripheral", config.tol.peripheral, "clustering tolerance for |lambda| = 1")
      ->capture_default_str();
  app->add_option("--tol-rank", config.tol.rank, "relative singular-value cutoff")->capture_default_str();
  app->add_option("--tol-positivity", config.tol.positivity, "eigenvalue slack for PSD tests")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  CLI::App app{"Attractor and asymptotic analysis of quantum Markov chains"};
  app.require_subcommand(1);

  CLI::App* analyze = app.add_subcommand("analyze", "spectrum, attractor basis and invariant state of a channel");
  CLI::App* evolve = app.add_subcommand("evolve", "distance between P^n(X0) and its asymptotic prediction");
  CLI::App* verify = app.add_subcommand("verify", "check the structural properties for a channel");
  CLI::App* generate = app.add_subcommand("generate", "write a standard channel as JSON");

  for (CLI::App* sub : {analyze, evolve, verify}) {
    sub->add_option("--channel", config.channel_path, "channel JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", config.out_path, "output directory for reports");
    add_tolerances(sub, config);
  }
  evolve->add_option("--state", config.state_path, "initial state JSON (default I/N)")->check(CLI::ExistingFile);
  evolve->add_option("--n,--ns", config.ns, "iteration counts")->required()->delimiter(',');
  verify->add_option("--rho", config.rho_path, "strictly positive subinvariant state JSON")->check(CLI::ExistingFile);

  generate->add_option("--kind", config.kind,
                       "identity | unitary | random_unitary | amplitude_damping | depolarizing | phase_damping | "
                       "random_cptp | random_cptni")
      ->required();
  generate->add_option("--dim", config.dim, "Hilbert space dimension")->capture_default_str();
  generate->add_option("--param,--gamma,--p,--lambda", config.param, "damping or noise parameter");
  generate->add_option("--kraus-count", config.kraus_count, "number of Kraus operators")->capture_default_str();
  generate->add_option("--shrink", config.shrink, "scale factor for random_cptni")->capture_default_str();
  generate->add_option("--unitary", config.unitary_path, "matrix JSON for kind=unitary")->check(CLI::ExistingFile);
  generate->add_option("--unitaries", config.unitaries_path,
                       "JSON list of matrices, or Pauli names such as I,X for kind=random_unitary");
  generate->add_option("--weights", config.weights, "mixture weights for kind=random_unitary")->delimiter(',');
  generate->add_option("--out", config.out_path, "output file (default stdout)");
  add_tolerances(generate, config);
  for (CLI::App* sub : {analyze, evolve, verify, generate})
    sub->add_option("--seed", config.seed, "RNG seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return qmarkov::cli::kPrecondition;
  }

  if (analyze->parsed()) config.command = Command::analyze;
  if (evolve->parsed()) config.command = Command::evolve;
  if (verify->parsed()) config.command = Command::verify;
  if (generate->parsed()) config.command = Command::generate;
  return qmarkov::cli::run(config, std::cout, std::cerr);
}
