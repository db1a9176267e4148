// Copyright 2026 The Fidelity Forge Authors
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fidelity_forge/basis.hpp"
#include "fidelity_forge/errors.hpp"
#include "fidelity_forge/rng.hpp"

using namespace ff;

namespace {

DensityMatrix haar_qubit(Rng& rng) {
  // Uniform on the Bloch sphere.
  const double z = uniform(rng, -1, 1);
  const double phi = uniform(rng, 0, 2 * M_PI);
  const double r = std::sqrt(1 - z * z);
  return bloch_state({r * std::cos(phi), r * std::sin(phi), z});
}

}  // namespace

TEST_CASE("single-qubit SIC states") {
  const auto states = sic_single_qubit();
  ComplexMatrix sum = ComplexMatrix::Zero(2, 2);
  for (int a = 0; a < 4; ++a) {
    CHECK(std::abs(states[a].trace() - Complex{1, 0}) < 1e-12);
    CHECK(std::abs((states[a] * states[a]).trace() - Complex{1, 0}) < 1e-12);
    for (int b = 0; b < 4; ++b) {
      if (a != b) CHECK(std::abs((states[a] * states[b]).trace().real() - 1.0 / 3.0) < 1e-12);
    }
    sum += states[a];
  }
  CHECK((sum - 2.0 * ComplexMatrix::Identity(2, 2)).norm() < 1e-12);
  const auto r = sic_bloch_vectors();
  CHECK(r[1][0] == doctest::Approx(2 * std::sqrt(2.0) / 3));
  CHECK(r[2][1] == doctest::Approx(std::sqrt(2.0 / 3)));
}

TEST_CASE("product SIC states") {
  const SicSet one = sic_product_states(1);
  const auto single = sic_single_qubit();
  for (int a = 0; a < 4; ++a) CHECK((one.states[a] - single[a]).norm() < 1e-15);
  const SicSet two = sic_product_states(2);
  const auto i01 = digits_to_index(std::vector<int>{0, 1});
  const auto i02 = digits_to_index(std::vector<int>{0, 2});
  CHECK((two.states[i01] * two.states[i02]).trace().real() == doctest::Approx(1.0 / 3));
  const SicSet three = sic_product_states(3);
  const auto a = digits_to_index(std::vector<int>{0, 1, 2});
  const auto b = digits_to_index(std::vector<int>{1, 2, 3});
  CHECK((three.states[a] * three.states[b]).trace().real() == doctest::Approx(1.0 / 27));
  for (std::size_t i = 0; i < three.states.size(); i += 7) {
    for (std::size_t j = 0; j < three.states.size(); j += 5) {
      const double expected = std::pow(1.0 / 3.0, hamming_distance(i, j, 3));
      CHECK(std::abs((three.states[i] * three.states[j]).trace().real() - expected) < 1e-10);
    }
  }
  CHECK_THROWS_AS(sic_product_states(7), Error);
}

TEST_CASE("Pauli basis") {
  const PauliBasis one = pauli_basis(1);
  CHECK((one.observables[0] - ComplexMatrix::Identity(2, 2) / std::sqrt(2.0)).norm() < 1e-15);
  const PauliBasis two = pauli_basis(2);
  const auto xz = digits_to_index(std::vector<int>{1, 3});
  const auto xy = digits_to_index(std::vector<int>{1, 2});
  CHECK(std::abs(frob_inner(two.observables[xz], two.observables[xz]) - Complex{1, 0}) < 1e-12);
  CHECK(std::abs(frob_inner(two.observables[xz], two.observables[xy])) < 1e-12);
  for (const auto& w : two.observables) CHECK((w * w - ComplexMatrix::Identity(4, 4) / 4.0).norm() < 1e-12);
  CHECK_THROWS_AS(pauli_basis(0), Error);
}

TEST_CASE("overlap structure and closed-form inverse") {
  const OverlapStructure s1 = overlap_structure(sic_product_states(1));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) CHECK(s1.single_qubit_inverse(i, j) == doctest::Approx(i == j ? 1.25 : -0.25));
  }
  for (int n = 1; n <= 3; ++n) {
    const OverlapStructure s = overlap_structure(sic_product_states(n));
    const auto size = s.overlaps.rows();
    CHECK((s.overlaps * s.inverse - RealMatrix::Identity(size, size)).norm() < 1e-8);
    CHECK((s.overlaps.inverse() - s.inverse).norm() < 1e-8);
    CHECK((s.overlaps - s.overlaps.transpose()).norm() == 0.0);
    for (Eigen::Index i = 0; i < size; ++i) {
      CHECK(s.overlaps(i, i) == doctest::Approx(1.0));
      for (Eigen::Index j = 0; j < size; ++j) {
        const int m = hamming_distance(static_cast<std::size_t>(i), static_cast<std::size_t>(j), n);
        CHECK(std::abs(s.inverse(i, j) - std::pow(-1.0, m) * std::pow(5.0, n - m) / std::pow(4.0, n)) < 1e-10);
      }
    }
  }
  const OverlapStructure s2 = overlap_structure(sic_product_states(2));
  CHECK(s2.inverse(0, digits_to_index(std::vector<int>{1, 1})) == doctest::Approx(1.0 / 16));
  const OverlapStructure s3 = overlap_structure(sic_product_states(3));
  CHECK(s3.inverse(5, 5) == doctest::Approx(125.0 / 64));
}

TEST_CASE("order coefficients") {
  CHECK(order_coefficient(1, 0) == doctest::Approx(1.25));
  CHECK(order_coefficient(1, 1) == doctest::Approx(-0.25));
  CHECK(order_coefficient(3, 2) == doctest::Approx(5.0 / 64));
  CHECK_THROWS_AS(order_coefficient(2, 3), Error);
  CHECK_THROWS_AS(order_coefficient(2, -1), Error);
}

TEST_CASE("overlap cost") {
  const auto single = sic_single_qubit();
  CHECK(overlap_cost(std::vector<DensityMatrix>(single.begin(), single.end())) == doctest::Approx(4.0));
  const SicSet two = sic_product_states(2);
  double oracle = 0.0;
  for (std::size_t i = 0; i < two.states.size(); ++i)
    for (std::size_t j = 0; j < two.states.size(); ++j)
      if (i != j) oracle += (two.states[i] * two.states[j]).trace().real();
  CHECK(overlap_cost(two.states) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(overlap_cost(std::vector<DensityMatrix>(4, single[2])) == doctest::Approx(12.0));
}

TEST_CASE("product SIC sets minimize the overlap cost") {
  Rng rng = split_stream(7, {});
  for (int n = 1; n <= 2; ++n) {
    const double sic_cost = overlap_cost(sic_product_states(n).states);
    const std::size_t count = std::size_t{1} << (2 * n);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<DensityMatrix> states;
      for (std::size_t i = 0; i < count; ++i) {
        DensityMatrix rho = haar_qubit(rng);
        for (int q = 1; q < n; ++q) rho = kron(rho, haar_qubit(rng));
        states.push_back(rho);
      }
      CHECK(overlap_cost(states) >= sic_cost - 1e-9);
    }
  }
}

TEST_CASE("SIC states span operator space") {
  for (int n = 1; n <= 3; ++n) {
    const SicSet sic = sic_product_states(n);
    const PauliBasis pauli = pauli_basis(n);
    RealMatrix coeffs(pauli.observables.size(), sic.states.size());
    for (std::size_t i = 0; i < sic.states.size(); ++i)
      for (std::size_t j = 0; j < pauli.observables.size(); ++j)
        coeffs(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = frob_inner(pauli.observables[j], sic.states[i]).real();
    const Eigen::JacobiSVD<RealMatrix> svd(coeffs);
    CHECK(svd.singularValues().minCoeff() > 1e-8);
  }
}

TEST_CASE("reconstruction through the inverse overlap matrix") {
  Rng rng = split_stream(8, {});
  for (int n = 1; n <= 3; ++n) {
    const SicSet sic = sic_product_states(n);
    const OverlapStructure s = overlap_structure(sic);
    const Eigen::Index d = Eigen::Index{1} << n;
    ComplexMatrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) a(i, j) = {uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const ComplexMatrix m = (a + a.adjoint()) / 2.0;
    ComplexMatrix back = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < sic.states.size(); ++i)
      for (std::size_t j = 0; j < sic.states.size(); ++j)
        back += s.inverse(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * (sic.states[j] * m).trace() * sic.states[i];
    CHECK((back - m).norm() < 1e-8);
  }
}
