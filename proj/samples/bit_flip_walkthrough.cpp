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

// Walks through the bit-flip channel: peripheral spectrum, attractor basis
// with duals, and the decay of ||P^n(E11) - X_inf(n)||.

#include <iostream>

#include "qmarkov/qmarkov.hpp"

int main() {
  using namespace qmarkov;
  const std::vector<double> weights{0.7, 0.3};
  const std::vector<Operator> unitaries{identity(2), pauli_x()};
  const KrausMap bit_flip = random_unitary_channel(weights, unitaries);

  const SpectralData spectrum = full_spectrum(bit_flip);
  std::cout << "eigenvalues:";
  for (const Complex& l : spectrum.eigenvalues) std::cout << ' ' << l.real();
  std::cout << "\n";

  const AttractorBasis basis = attractor_basis(spectrum);
  for (const AttractorEntry& e : basis.entries)
    std::cout << "lambda " << e.lambda << "\nX =\n" << e.x << "\ndual =\n" << e.dual << "\n";

  Operator x0 = Operator::Zero(2, 2);
  x0(0, 0) = 1.0;
  const std::vector<long long> ns{1, 5, 10, 20};
  for (const ConvergencePoint& p : convergence_report(bit_flip, build_model(bit_flip, spectrum, x0), ns))
    std::cout << "n=" << p.n << "  distance=" << p.distance << "\n";
}
