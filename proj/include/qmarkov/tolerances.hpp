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

namespace qmarkov {

/// Numerical thresholds shared by the whole pipeline.
struct Tolerances {
  /// Absolute bound for Hermiticity and positive-semidefiniteness tests.
  double positivity = 1e-10;
  /// Singular values below rank * (largest singular value) count as zero.
  double rank = 1e-9;
  /// Eigenvalues with |1 - |lambda|| <= peripheral are on the unit circle;
  /// also the merge distance for eigenvalue clusters.
  double peripheral = 1e-7;
};

}  // namespace qmarkov
