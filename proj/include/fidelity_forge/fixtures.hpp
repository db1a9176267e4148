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

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ff {

/// Coefficients alpha of H = sum alpha_{i1..in} sigma^(i1) (x) ... (x) sigma^(in),
/// indexed by the base-4 value of the Pauli digit string.
struct RandomHermitianCoeffs {
  int n_qubits = 0;
  std::vector<double> alpha;
};

struct ScheduleRow {
  long long total_experiments = 0;
  int zero_l = 0;
  int zero_m = 0;
  int process_l = 0;
  int process_unique = 0;
  int process_shots_per_experiment = 0;
};

/// Parses the coefficient fixture format: one "<digits> <value>" pair per
/// line, '#' starts a comment. Every digit string of the inferred qubit
/// count must appear exactly once.
RandomHermitianCoeffs parse_coefficients(std::string_view text);

/// Parses "u3.<k>.<theta|phi|lambda> <value>" lines into 3 * gate_count
/// parameters ordered (theta, phi, lambda) per gate.
std::vector<double> parse_u3_parameters(std::string_view text, int gate_count);

std::vector<ScheduleRow> parse_schedule(std::string_view text);

/// Bundled fixtures by name: table1..table5 (coefficients), table6, table7,
/// toronto (U3 parameters), schedule, paper.cfg.
std::string_view bundled_fixture(std::string_view name);
std::vector<std::string> bundled_fixture_names();

RandomHermitianCoeffs hermitian_table(int table_number);  // 1..5
std::vector<double> u3_table(std::string_view name);      // "table6", "table7", "toronto"
std::vector<ScheduleRow> budget_schedule();

std::string read_text_file(const std::string& path);

}  // namespace ff
