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

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "test_support.hpp"

namespace qmarkov {
namespace {

using testing::Rng;

Operator diag2(Complex a, Complex b) {
  Operator d = Operator::Zero(2, 2);
  d(0, 0) = a;
  d(1, 1) = b;
  return d;
}

bool contains(const SubspaceBasis& basis, const Operator& x) {
  const Matrix q = testing::orthonormal_columns(testing::stack(basis.elements));
  const Vector v = vectorize(x);
  return (v - q * (q.adjoint() * v)).norm() <= 1e-9 * v.norm();
}

TEST(FullSpectrum, IdentityChannel) {
  const SpectralData s = full_spectrum(identity_channel(2));
  ASSERT_EQ(s.eigenvalues.size(), 4u);
  for (const Complex& z : s.eigenvalues) EXPECT_LT(std::abs(z - 1.0), 1e-14);
  ASSERT_EQ(s.peripheral_clusters.size(), 1u);
  EXPECT_EQ(s.peripheral_clusters[0].multiplicity, 4);
  EXPECT_EQ(s.subperipheral_modulus(), 0.0);
}

TEST(FullSpectrum, DiagonalUnitary) {
  const SpectralData s = full_spectrum(unitary_channel(diag2(1.0, Complex(0.0, 1.0))));
  ASSERT_EQ(s.peripheral_clusters.size(), 3u);
  // Ascending phase: 1 (d=2), i, -i.
  EXPECT_EQ(s.peripheral_clusters[0].lambda, Complex(1.0));
  EXPECT_EQ(s.peripheral_clusters[0].multiplicity, 2);
  EXPECT_LT(std::abs(s.peripheral_clusters[1].lambda - Complex(0.0, 1.0)), 1e-14);
  EXPECT_EQ(s.peripheral_clusters[1].multiplicity, 1);
  EXPECT_LT(std::abs(s.peripheral_clusters[2].lambda - Complex(0.0, -1.0)), 1e-14);
  EXPECT_EQ(s.peripheral_clusters[2].multiplicity, 1);
}

TEST(FullSpectrum, Depolarizing) {
  const SpectralData s = full_spectrum(depolarizing(0.5));
  ASSERT_EQ(s.peripheral_clusters.size(), 1u);
  EXPECT_EQ(s.peripheral_clusters[0].multiplicity, 1);
  EXPECT_LT(std::abs(s.eigenvalues[0] - 1.0), 1e-14);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_LT(std::abs(s.eigenvalues[i] - 0.5), 1e-12);
  EXPECT_NEAR(s.subperipheral_modulus(), 0.5, 1e-12);
}

TEST(FullSpectrum, EigenvaluesMatchCharacteristicOracle) {
  // Amplitude damping: the superoperator is upper triangular in a suitable
  // ordering with diagonal {1, sqrt(1-g), sqrt(1-g), 1-g}.
  const double g = 0.5;
  const SpectralData s = full_spectrum(amplitude_damping(g));
  std::vector<double> got;
  for (const Complex& z : s.eigenvalues) {
    EXPECT_LT(std::abs(z.imag()), 1e-12);
    got.push_back(z.real());
  }
  std::vector<double> want{1.0, std::sqrt(1 - g), std::sqrt(1 - g), 1 - g};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
}

TEST(FullSpectrum, OrderingIsDescendingModulus) {
  for (int t = 0; t < 10; ++t) {
    const SpectralData s = full_spectrum(random_cptp(2 + t % 3, 2, 1000 + t));
    for (std::size_t i = s.peripheral_count() + 1; i < s.eigenvalues.size(); ++i)
      EXPECT_GE(std::abs(s.eigenvalues[i - 1]) + 1e-12, std::abs(s.eigenvalues[i]));
    for (std::size_t i = 0; i < s.peripheral_count(); ++i)
      EXPECT_LE(std::abs(1.0 - std::abs(s.eigenvalues[i])), s.tol_peripheral);
  }
}

TEST(FullSpectrum, ClustersAreSeparated) {
  Rng rng(20);
  for (int t = 0; t < 10; ++t) {
    const SpectralData s = full_spectrum(unitary_channel(testing::random_unitary(3, rng)));
    for (std::size_t a = 0; a < s.peripheral_clusters.size(); ++a)
      for (std::size_t b = a + 1; b < s.peripheral_clusters.size(); ++b)
        EXPECT_GT(std::abs(s.peripheral_clusters[a].lambda - s.peripheral_clusters[b].lambda),
                  2 * s.tol_peripheral);
  }
}

TEST(FullSpectrum, PeripheralBiorthonormality) {
  for (int t = 0; t < 20; ++t) {
    const testing::UnitalCase c = testing::unital_case(t, 2000 + t);
    const SpectralData s = full_spectrum(c.map);
    for (std::size_t a = 0; a < s.peripheral_count(); ++a)
      for (std::size_t b = 0; b < s.peripheral_count(); ++b)
        EXPECT_LT(std::abs(hs_inner(s.left_vectors[a], s.right_vectors[b]) - Complex(a == b ? 1.0 : 0.0)), 1e-8);
  }
}

TEST(FullSpectrum, FullBiorthonormalityForNondegenerateMaps) {
  for (int t = 0; t < 10; ++t) {
    const SpectralData s = full_spectrum(random_cptp(2 + t % 3, 3, 3000 + t));
    ASSERT_TRUE(s.decaying_left_available);
    ASSERT_EQ(s.left_vectors.size(), s.eigenvalues.size());
    for (std::size_t a = 0; a < s.eigenvalues.size(); ++a)
      for (std::size_t b = 0; b < s.eigenvalues.size(); ++b)
        EXPECT_LT(std::abs(hs_inner(s.left_vectors[a], s.right_vectors[b]) - Complex(a == b ? 1.0 : 0.0)), 1e-8);
  }
}

TEST(FullSpectrum, PeripheralAndDecayingPartsSpanOperatorSpace) {
  for (int t = 0; t < 10; ++t) {
    const testing::UnitalCase c = testing::unital_case(t, 4000 + t);
    const SpectralData s = full_spectrum(c.map);
    const Eigen::Index n2 = c.map.dim() * c.map.dim();
    const std::size_t d = s.peripheral_count();
    // Peripheral right vectors together with the orthogonal complement of
    // the peripheral left vectors.
    Matrix left(n2, static_cast<Eigen::Index>(d));
    Matrix right(n2, static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) {
      left.col(static_cast<Eigen::Index>(k)) = vectorize(s.left_vectors[k]);
      right.col(static_cast<Eigen::Index>(k)) = vectorize(s.right_vectors[k]);
    }
    const Matrix complement = linalg::null_space(left.adjoint(), 1e-9);
    Matrix joined(n2, right.cols() + complement.cols());
    joined << right, complement;
    EXPECT_EQ(linalg::numerical_rank(joined, 1e-9), n2);
  }
}

TEST(PeripheralSpectrum, HandExamples) {
  const auto flip = peripheral_spectrum(testing::bit_flip(0.3));
  ASSERT_EQ(flip.size(), 1u);
  EXPECT_EQ(flip[0].lambda, Complex(1.0));
  EXPECT_EQ(flip[0].multiplicity, 2);

  const Complex w = std::polar(1.0, std::numbers::pi / 3);
  const auto rot = peripheral_spectrum(unitary_channel(diag2(1.0, w)));
  ASSERT_EQ(rot.size(), 3u);
  EXPECT_EQ(rot[0].multiplicity, 2);
  EXPECT_LT(std::abs(rot[1].lambda - w), 1e-14);
  EXPECT_EQ(rot[1].multiplicity, 1);
  EXPECT_LT(std::abs(rot[2].lambda - std::conj(w)), 1e-14);  // phase 5 pi / 3 sorts last
  EXPECT_EQ(rot[2].multiplicity, 1);

  const auto damp = peripheral_spectrum(amplitude_damping(0.5));
  ASSERT_EQ(damp.size(), 1u);
  EXPECT_EQ(damp[0].multiplicity, 1);
}

TEST(PeripheralSpectrum, RefusesMapsThatAreNotTraceNonincreasing) {
  EXPECT_THROW(peripheral_spectrum(KrausMap({1.2 * identity(2)})), PreconditionError);
}

TEST(SpectralRadius, RandomMapsStayInsideUnitDisc) {
  for (int t = 0; t < 60; ++t) {
    const Eigen::Index n = 2 + t % 3;
    const KrausMap map = (t % 2) ? random_cptp(n, 1 + t % 4, 5000 + t) : random_cptni(n, 1 + t % 4, 5000 + t, 0.3 + 0.01 * t);
    EXPECT_LE(spectral_radius(map.superoperator()), 1.0 + 1e-8);
  }
}

TEST(SpectralRadius, TracePreservingMapsHaveEigenvalueOne) {
  for (int t = 0; t < 20; ++t) {
    const SpectralData s = full_spectrum(random_cptp(2 + t % 3, 1 + t % 3, 6000 + t));
    double best = 1.0;
    for (const Complex& z : s.eigenvalues) best = std::min(best, std::abs(z - 1.0));
    EXPECT_LE(best, 1e-8);
  }
}

TEST(EigenspaceBasis, HandExamples) {
  EXPECT_EQ(eigenspace_basis(identity_channel(2), 1.0).size(), 4u);

  const SubspaceBasis flip = eigenspace_basis(testing::bit_flip(0.3), 1.0);
  ASSERT_EQ(flip.size(), 2u);
  EXPECT_EQ(flip.orthonormal_under, InnerProduct::hs);
  EXPECT_TRUE(contains(flip, identity(2)));
  EXPECT_TRUE(contains(flip, pauli_x()));

  const SubspaceBasis damp = eigenspace_basis(amplitude_damping(0.5), 1.0);
  ASSERT_EQ(damp.size(), 1u);
  EXPECT_LT(hs_norm(damp.elements[0] - matrix_unit(2, 0, 0)), 1e-12);
}

TEST(EigenspaceBasis, ResidualBound) {
  for (int t = 0; t < 10; ++t) {
    const testing::UnitalCase c = testing::unital_case(t, 7000 + t);
    const SpectralData s = full_spectrum(c.map);
    for (const PeripheralCluster& cl : s.peripheral_clusters)
      for (const Operator& x : eigenspace_basis(c.map, cl.lambda).elements)
        EXPECT_LE(hs_norm(c.map.apply(x) - cl.lambda * x), 10 * 1e-7 * hs_norm(x));
  }
}

TEST(EigenspaceBasis, NonEigenvalueThrows) {
  EXPECT_THROW(eigenspace_basis(testing::bit_flip(0.3), Complex(-1.0)), PreconditionError);
}

TEST(RangeBasis, HandExamples) {
  EXPECT_EQ(range_basis(identity_channel(2), 1.0).size(), 0u);
  EXPECT_EQ(ker_ran_intersection_dim(identity_channel(2), 1.0), 0);

  const KernelRangeDims dims = kernel_range_dims(testing::bit_flip(0.3).superoperator(), 1.0);
  EXPECT_EQ(dims.kernel, 2);
  EXPECT_EQ(dims.range, 2);
  EXPECT_EQ(dims.intersection, 0);
  EXPECT_EQ(range_basis(testing::bit_flip(0.3), 1.0).size(), 2u);
}

TEST(RangeBasis, DetectsJordanBlock) {
  // Non-quantum: a 2x2 Jordan block for eigenvalue 1 on the (E11, E21) pair.
  Matrix s = Matrix::Identity(4, 4);
  s(0, 1) = 1.0;
  const Superoperator jordan(2, s);
  EXPECT_GT(ker_ran_intersection_dim(jordan, 1.0), 0);
}

TEST(RangeBasis, PeripheralKernelAndRangeAreComplementary) {
  for (int t = 0; t < 20; ++t) {
    const KrausMap map = random_cptp(2 + t % 3, 1 + t % 4, 8000 + t);
    const SpectralData s = full_spectrum(map);
    for (const PeripheralCluster& c : s.peripheral_clusters) {
      const KernelRangeDims dims = kernel_range_dims(map.superoperator(), c.lambda);
      EXPECT_EQ(dims.intersection, 0);
      EXPECT_EQ(dims.kernel + dims.range, map.dim() * map.dim());
    }
  }
}

TEST(FullSpectrum, DeterministicAcrossRuns) {
  const KrausMap map = random_cptp(3, 2, 77);
  const SpectralData a = full_spectrum(map);
  const SpectralData b = full_spectrum(random_cptp(3, 2, 77));
  ASSERT_EQ(a.eigenvalues.size(), b.eigenvalues.size());
  for (std::size_t i = 0; i < a.eigenvalues.size(); ++i) EXPECT_EQ(a.eigenvalues[i], b.eigenvalues[i]);
  for (std::size_t i = 0; i < a.peripheral_count(); ++i) EXPECT_EQ(a.right_vectors[i], b.right_vectors[i]);
}

}  // namespace
}  // namespace qmarkov
