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

#include "fidelity_forge/fixtures.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "fidelity_forge/errors.hpp"

namespace ff {

// Defined in the generated fixtures_embedded.cpp.
namespace embedded {
struct Entry {
  const char* name;
  const char* text;
};
extern const Entry kFixtures[];
extern const std::size_t kFixtureCount;
}  // namespace embedded

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view token, std::string_view context) {
  double value = 0.0;
  const auto* begin = token.data();
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw Error(ErrorCode::InvalidFixture, "bad number '" + std::string(token) + "' in " + std::string(context));
  }
  return value;
}

/// Splits non-comment lines into whitespace-separated tokens.
std::vector<std::vector<std::string_view>> tokenize(std::string_view text) {
  std::vector<std::vector<std::string_view>> rows;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string_view> tokens;
    while (!line.empty()) {
      const auto sp = line.find_first_of(" \t");
      tokens.push_back(line.substr(0, sp));
      line = sp == std::string_view::npos ? std::string_view{} : trim(line.substr(sp));
    }
    rows.push_back(std::move(tokens));
  }
  return rows;
}

}  // namespace

RandomHermitianCoeffs parse_coefficients(std::string_view text) {
  const auto rows = tokenize(text);
  if (rows.empty()) throw Error(ErrorCode::InvalidFixture, "coefficient file is empty");
  const auto n = static_cast<int>(rows.front()[0].size());
  if (n < 1 || n > 6) throw Error(ErrorCode::InvalidFixture, "coefficient keys must have 1..6 digits");
  RandomHermitianCoeffs out;
  out.n_qubits = n;
  const std::size_t count = std::size_t{1} << (2 * n);
  out.alpha.assign(count, 0.0);
  std::vector<bool> seen(count, false);
  for (const auto& row : rows) {
    if (row.size() != 2) throw Error(ErrorCode::InvalidFixture, "expected '<digits> <value>'");
    const auto key = row[0];
    if (static_cast<int>(key.size()) != n) throw Error(ErrorCode::InvalidFixture, "inconsistent key length: " + std::string(key));
    std::size_t index = 0;
    for (char c : key) {
      if (c < '0' || c > '3') throw Error(ErrorCode::InvalidFixture, "key digits must be 0..3: " + std::string(key));
      index = (index << 2) | static_cast<std::size_t>(c - '0');
    }
    if (seen[index]) throw Error(ErrorCode::InvalidFixture, "duplicate key " + std::string(key));
    seen[index] = true;
    out.alpha[index] = parse_double(row[1], key);
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (!seen[i]) {
      throw Error(ErrorCode::InvalidFixture,
                  "expected " + std::to_string(count) + " coefficients, some keys are missing");
    }
  }
  return out;
}

std::vector<double> parse_u3_parameters(std::string_view text, int gate_count) {
  const auto rows = tokenize(text);
  std::vector<double> params(static_cast<std::size_t>(3 * gate_count), 0.0);
  std::vector<bool> seen(params.size(), false);
  for (const auto& row : rows) {
    if (row.size() != 2) throw Error(ErrorCode::InvalidFixture, "expected 'u3.<k>.<name> <value>'");
    const std::string key(row[0]);
    const auto dot1 = key.find('.');
    const auto dot2 = key.rfind('.');
    if (key.rfind("u3.", 0) != 0 || dot1 == dot2) throw Error(ErrorCode::InvalidFixture, "bad U3 key " + key);
    int gate = 0;
    const std::string gate_str = key.substr(dot1 + 1, dot2 - dot1 - 1);
    auto [ptr, ec] = std::from_chars(gate_str.data(), gate_str.data() + gate_str.size(), gate);
    if (ec != std::errc{} || gate < 1 || gate > gate_count) throw Error(ErrorCode::InvalidFixture, "bad gate index in " + key);
    const std::string which = key.substr(dot2 + 1);
    int offset = 0;
    if (which == "theta") offset = 0;
    else if (which == "phi") offset = 1;
    else if (which == "lambda") offset = 2;
    else throw Error(ErrorCode::InvalidFixture, "bad parameter name in " + key);
    const auto slot = static_cast<std::size_t>(3 * (gate - 1) + offset);
    if (seen[slot]) throw Error(ErrorCode::InvalidFixture, "duplicate key " + key);
    seen[slot] = true;
    params[slot] = parse_double(row[1], key);
  }
  for (bool s : seen) {
    if (!s) throw Error(ErrorCode::InvalidFixture, "expected " + std::to_string(params.size()) + " U3 parameters");
  }
  return params;
}

std::vector<ScheduleRow> parse_schedule(std::string_view text) {
  std::vector<ScheduleRow> out;
  for (const auto& row : tokenize(text)) {
    if (row.size() != 6) throw Error(ErrorCode::InvalidFixture, "schedule rows need 6 columns");
    auto as_int = [](std::string_view t) {
      long long v = 0;
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc{} || ptr != t.data() + t.size() || v <= 0) {
        throw Error(ErrorCode::InvalidFixture, "bad schedule entry '" + std::string(t) + "'");
      }
      return v;
    };
    ScheduleRow r;
    r.total_experiments = as_int(row[0]);
    r.zero_l = static_cast<int>(as_int(row[1]));
    r.zero_m = static_cast<int>(as_int(row[2]));
    r.process_l = static_cast<int>(as_int(row[3]));
    r.process_unique = static_cast<int>(as_int(row[4]));
    r.process_shots_per_experiment = static_cast<int>(as_int(row[5]));
    out.push_back(r);
  }
  if (out.empty()) throw Error(ErrorCode::InvalidFixture, "schedule is empty");
  return out;
}

std::string_view bundled_fixture(std::string_view name) {
  for (std::size_t i = 0; i < embedded::kFixtureCount; ++i) {
    if (name == embedded::kFixtures[i].name) return embedded::kFixtures[i].text;
  }
  throw Error(ErrorCode::InvalidFixture, "no bundled fixture named '" + std::string(name) + "'");
}

std::vector<std::string> bundled_fixture_names() {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < embedded::kFixtureCount; ++i) names.emplace_back(embedded::kFixtures[i].name);
  return names;
}

RandomHermitianCoeffs hermitian_table(int table_number) {
  if (table_number < 1 || table_number > 5) {
    throw Error(ErrorCode::InvalidFixture, "coefficient tables are numbered 1..5");
  }
  auto coeffs = parse_coefficients(bundled_fixture("table" + std::to_string(table_number)));
  const int expected = table_number == 2 ? 2 : 3;
  if (coeffs.n_qubits != expected) throw Error(ErrorCode::InvalidFixture, "unexpected qubit count in bundled table");
  return coeffs;
}

std::vector<double> u3_table(std::string_view name) {
  if (name != "table6" && name != "table7" && name != "toronto") {
    throw Error(ErrorCode::InvalidFixture, "no U3 table named '" + std::string(name) + "'");
  }
  return parse_u3_parameters(bundled_fixture(name), 10);
}

std::vector<ScheduleRow> budget_schedule() { return parse_schedule(bundled_fixture("schedule")); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ff
