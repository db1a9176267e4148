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

#include "fidelity_forge/config.hpp"
#include "fidelity_forge/errors.hpp"

using namespace ff;

namespace {

std::vector<ConfigKey> schema() {
  return {{"seed", ValueKind::Unsigned, "0"},
          {"run.count", ValueKind::Integer, "3"},
          {"run.rate", ValueKind::Real, "0.5"},
          {"run.enabled", ValueKind::Boolean, "false"},
          {"run.inner.mode", ValueKind::Text, "fast"}};
}

}  // namespace

TEST_CASE("nested key/value parsing") {
  const auto kv = parse_key_values(
      "# leading comment\n"
      "top = 1\n"
      "[run]\n"
      "count = 7   # trailing comment\n"
      "\n"
      "[run.inner]\n"
      "mode = slow\n"
      "[]\n"
      "seed = 9\n");
  REQUIRE(kv.size() == 4);
  CHECK(kv[0] == std::pair<std::string, std::string>{"top", "1"});
  CHECK(kv[1] == std::pair<std::string, std::string>{"run.count", "7"});
  CHECK(kv[2] == std::pair<std::string, std::string>{"run.inner.mode", "slow"});
  CHECK(kv[3] == std::pair<std::string, std::string>{"seed", "9"});
}

TEST_CASE("malformed documents name the line") {
  auto message = [](const char* text) {
    try {
      parse_key_values(text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidConfig);
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("a = 1\n[run\n").find("line 2") != std::string::npos);
  CHECK(message("a = 1\nb\n").find("line 2") != std::string::npos);
  CHECK(message("Bad = 1\n").find("line 1") != std::string::npos);
  CHECK(message("a..b = 1\n").find("line 1") != std::string::npos);
  CHECK(message("a =\n").find("line 1") != std::string::npos);
}

TEST_CASE("typed values and defaults") {
  RunConfig c(schema());
  CHECK(c.unsigned_integer("seed") == 0);
  CHECK(c.integer("run.count") == 3);
  CHECK(c.real("run.rate") == 0.5);
  CHECK(!c.boolean("run.enabled"));
  CHECK(c.text("run.inner.mode") == "fast");
  c.set("run.count", "-4");
  c.set("run.rate", "1e-3");
  c.set("run.enabled", "yes");
  c.set("seed", "+18446744073709551615");
  CHECK(c.integer("run.count") == -4);
  CHECK(c.real("run.rate") == 0.001);
  CHECK(c.boolean("run.enabled"));
  CHECK(c.unsigned_integer("seed") == 18446744073709551615ULL);
  CHECK(c.has("run.rate"));
  CHECK(!c.has("run.other"));
}

TEST_CASE("bad keys and values are rejected") {
  RunConfig c(schema());
  CHECK_THROWS_AS(c.set("run.other", "1"), Error);
  CHECK_THROWS_AS(c.set("run.count", "1.5"), Error);
  CHECK_THROWS_AS(c.set("seed", "-1"), Error);
  CHECK_THROWS_AS(c.set("run.rate", "nan"), Error);
  CHECK_THROWS_AS(c.set("run.rate", "inf"), Error);
  CHECK_THROWS_AS(c.set("run.enabled", "maybe"), Error);
  CHECK_THROWS_AS(c.real("run.count"), Error);
  CHECK_THROWS_AS(c.merge("[run]\nunknown = 2\n", "file.cfg"), Error);
  try {
    c.merge("[run]\ncount = x\n", "file.cfg");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("file.cfg") != std::string::npos);
  }
  CHECK_THROWS_AS(RunConfig({{"a", ValueKind::Integer, "1"}, {"a", ValueKind::Integer, "2"}}), Error);
  CHECK_THROWS_AS(RunConfig({{"a", ValueKind::Integer, "one"}}), Error);
}

TEST_CASE("merge applies sections and the echo is canonical") {
  RunConfig a(schema()), b(schema());
  a.merge("[run]\nrate = 0.25\nenabled = 1\n", "a");
  b.set("run.rate", "2.5e-1");
  b.set("run.enabled", "true");
  CHECK(a.echo() == b.echo());
  CHECK(a.echo() ==
        "# run.count = 3\n"
        "# run.enabled = true\n"
        "# run.inner.mode = fast\n"
        "# run.rate = 0.25\n"
        "# seed = 0\n");
}

TEST_CASE("real formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.0, -2.5}) CHECK(std::stod(format_real(v)) == v);
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(2.0) == "2");
}
