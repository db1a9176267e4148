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

#include <algorithm>

#include "fidelity_forge/channels.hpp"
#include "fidelity_forge/errors.hpp"
#include "fidelity_forge/fixtures.hpp"

using namespace ff;

TEST_CASE("bundled fixtures are all present") {
  const auto names = bundled_fixture_names();
  for (const char* name : {"table1", "table2", "table3", "table4", "table5", "table6", "table7", "toronto", "schedule",
                           "paper.cfg"}) {
    CHECK(std::find(names.begin(), names.end(), name) != names.end());
    CHECK(!bundled_fixture(name).empty());
  }
  CHECK_THROWS_AS(bundled_fixture("table9"), Error);
}

TEST_CASE("coefficient tables have the expected sizes and ranges") {
  const int qubits[] = {3, 2, 3, 3, 3};
  for (int t = 1; t <= 5; ++t) {
    const RandomHermitianCoeffs c = hermitian_table(t);
    CHECK(c.n_qubits == qubits[t - 1]);
    CHECK(c.alpha.size() == (std::size_t{1} << (2 * c.n_qubits)));
    for (double a : c.alpha) CHECK(std::abs(a) <= 1.0);
  }
  CHECK(hermitian_table(1).alpha[0] == doctest::Approx(0.45631));
  CHECK(hermitian_table(1).alpha[1] == doctest::Approx(0.52325));
  CHECK_THROWS_AS(hermitian_table(0), Error);
  CHECK_THROWS_AS(hermitian_table(6), Error);
}

TEST_CASE("coefficient parser") {
  const RandomHermitianCoeffs c = parse_coefficients("# comment\n0 0.5\n1 -0.25\n2 0\n3 1 # trailing\n");
  CHECK(c.n_qubits == 1);
  CHECK(c.alpha == std::vector<double>{0.5, -0.25, 0.0, 1.0});
  CHECK_THROWS_AS(parse_coefficients("0 0.5\n1 0.1\n2 0.2\n"), Error);
  CHECK_THROWS_AS(parse_coefficients("0 0.5\n0 0.1\n2 0.2\n3 0.3\n"), Error);
  CHECK_THROWS_AS(parse_coefficients("0 0.5\n1 x\n2 0.2\n3 0.3\n"), Error);
  CHECK_THROWS_AS(parse_coefficients("0 0.5\n4 0.1\n2 0.2\n3 0.3\n"), Error);
}

TEST_CASE("U3 tables") {
  const auto t6 = u3_table("table6");
  const auto t7 = u3_table("table7");
  REQUIRE(t6.size() == kRandomCircuitParams);
  REQUIRE(t7.size() == kRandomCircuitParams);
  CHECK(t6[0] == doctest::Approx(4.84482));
  for (std::size_t i = 0; i < t6.size(); ++i) {
    CHECK(t6[i] >= 0.0);
    CHECK(t6[i] <= 2 * M_PI);
    CHECK(std::abs(t7[i] - t6[i]) <= 0.4);
  }
  CHECK(u3_table("toronto").size() == kRandomCircuitParams);
  CHECK_THROWS_AS(parse_u3_parameters("u3.1.theta 1\nu3.1.phi 2\n", 1), Error);
  CHECK(parse_u3_parameters("u3.1.lambda 3\nu3.1.theta 1\nu3.1.phi 2\n", 1) == std::vector<double>{1, 2, 3});
}

TEST_CASE("budget schedule") {
  const auto rows = budget_schedule();
  REQUIRE(rows.size() >= 3);
  CHECK(rows[0].total_experiments == 896);
  for (const auto& r : rows) {
    CHECK(static_cast<long long>(r.zero_l) * r.zero_m == r.total_experiments);
    CHECK(static_cast<long long>(r.process_unique) * r.process_shots_per_experiment == r.total_experiments);
    CHECK(r.process_unique == std::min(8 * r.process_l, 896));
  }
}
