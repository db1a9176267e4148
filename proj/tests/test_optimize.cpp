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
#include <cmath>
#include <sstream>

#include "fidelity_forge/errors.hpp"
#include "fidelity_forge/optimize.hpp"
#include "fidelity_forge/rng.hpp"

using namespace ff;

namespace {

std::vector<Observation> sample_observations(int count, const ParameterBounds& bounds, Rng& rng,
                                             double (*f)(std::span<const double>)) {
  std::vector<Observation> obs;
  for (int i = 0; i < count; ++i) {
    std::vector<double> x(bounds.size());
    for (std::size_t d = 0; d < x.size(); ++d) x[d] = uniform(rng, bounds.lo[d], bounds.hi[d]);
    obs.push_back({x, f(x)});
  }
  return obs;
}

double bowl(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += (v - 0.3) * (v - 0.3);
  return -s;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("parameter bounds") {
  const ParameterBounds b = ParameterBounds::uniform(3, -2.0, 2.0);
  CHECK(b.contains(std::vector<double>{0, 1, -2}));
  CHECK(!b.contains(std::vector<double>{0, 2.5, 0}));
  const auto u = b.to_unit(std::vector<double>{-2, 0, 2});
  CHECK(u == std::vector<double>{0, 0.5, 1});
  CHECK(b.from_unit(u) == std::vector<double>{-2, 0, 2});
  CHECK_THROWS_AS(ParameterBounds::uniform(2, 1.0, 1.0).validate(), Error);
}

TEST_CASE("Halton sequence") {
  CHECK(halton(1, 2) == 0.5);
  CHECK(halton(2, 2) == 0.25);
  CHECK(halton(3, 2) == 0.75);
  CHECK(halton(1, 3) == doctest::Approx(1.0 / 3));
  CHECK(halton(4, 3) == doctest::Approx(4.0 / 9));
}

TEST_CASE("expected improvement") {
  CHECK(expected_improvement(0.0, 0.0, 1.0) == 0.0);
  CHECK(expected_improvement(2.0, 0.0, 1.0) == doctest::Approx(1.0));
  // Zero mean gap: EI = sigma * phi(0).
  CHECK(expected_improvement(1.0, 4.0, 1.0) == doctest::Approx(2.0 / std::sqrt(2 * M_PI)));
  CHECK(expected_improvement(1.5, 1.0, 1.0) > expected_improvement(1.0, 1.0, 1.0));
  CHECK(expected_improvement(1.0, 2.0, 1.0) > expected_improvement(1.0, 1.0, 1.0));
}

TEST_CASE("surrogate interpolates and keeps variance non-negative") {
  const ParameterBounds bounds = ParameterBounds::uniform(2, -1.0, 1.0);
  Rng rng = split_stream(1, {});
  const auto obs = sample_observations(30, bounds, rng, bowl);
  const Surrogate s = Surrogate::fit(obs, bounds);
  for (const auto& o : obs) {
    const auto p = s.predict(o.params);
    CHECK(p.mean == doctest::Approx(o.value).epsilon(0.02).scale(1.0));
    CHECK(p.variance >= 0.0);
  }
  for (int t = 0; t < 200; ++t) {
    const std::vector<double> q{uniform(rng, -1, 1), uniform(rng, -1, 1)};
    CHECK(s.predict(q).variance >= 0.0);
  }
  CHECK(s.best_value() == std::max_element(obs.begin(), obs.end(), [](auto& a, auto& b) {
                            return a.value < b.value;
                          })->value);
  CHECK_THROWS_AS(Surrogate::fit({obs[0]}, bounds), Error);
}

TEST_CASE("surrogate flags constant data") {
  const ParameterBounds bounds = ParameterBounds::uniform(2, -1.0, 1.0);
  const std::vector<Observation> obs{{{0.1, 0.2}, 0.5}, {{-0.3, 0.4}, 0.5}, {{0.7, -0.9}, 0.5}};
  CHECK(Surrogate::fit(obs, bounds).flat());
}

TEST_CASE("acquisition candidates respect the bounds") {
  const ParameterBounds bounds = ParameterBounds::uniform(5, -0.5, 2.0);
  Rng rng = split_stream(2, {});
  const Surrogate s = Surrogate::fit(sample_observations(12, bounds, rng, bowl), bounds);
  AcquisitionConfig cfg;
  const auto cands = acquisition_candidates(s, cfg, rng);
  CHECK(cands.size() == 2048);
  for (const auto& c : cands) CHECK(bounds.contains(c));
  // Local candidates differ from the incumbent in exactly one coordinate.
  int local = 0;
  for (const auto& c : cands) {
    int moved = 0;
    for (std::size_t d = 0; d < c.size(); ++d) moved += c[d] != s.best_params()[d];
    local += moved == 1;
  }
  CHECK(local >= 1000);
  CHECK(bounds.contains(acquire(s, cfg, rng)));
}

TEST_CASE("Bayesian maximization finds a smooth optimum") {
  const ParameterBounds bounds = ParameterBounds::uniform(3, -1.0, 1.0);
  BayesianSettings settings;
  settings.iterations = 40;
  settings.initial_probes = 8;
  settings.seed = 3;
  const auto result = maximize([](std::span<const double> x, std::size_t) { return bowl(x); }, bounds, settings);
  CHECK(result.observations.size() == 40);
  CHECK(result.observations[result.best_index].value > -0.02);
  for (const auto& o : result.observations) CHECK(bounds.contains(o.params));
}

TEST_CASE("a single initial probe is topped up before fitting") {
  const ParameterBounds bounds = ParameterBounds::uniform(2, -1.0, 1.0);
  BayesianSettings settings;
  settings.iterations = 5;
  settings.initial_probes = 1;
  const auto result = maximize([](std::span<const double> x, std::size_t) { return bowl(x); }, bounds, settings);
  CHECK(result.observations.size() == 5);
  settings.initial_probes = 0;
  CHECK_THROWS_AS(maximize([](std::span<const double> x, std::size_t) { return bowl(x); }, bounds, settings), Error);
}

TEST_CASE("configuration validation") {
  OptimizationConfig c = OptimizationConfig::desk();
  CHECK_NOTHROW(c.validate());
  CHECK(c.iterations == 60);
  c.initial_probes = c.iterations + 1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = OptimizationConfig::desk();
  c.bounds = ParameterBounds::uniform(17, -1, 1);
  CHECK_THROWS_AS(c.validate(), Error);
  c = OptimizationConfig::desk();
  c.bounds = ParameterBounds::uniform(18, 0.5, 1);
  CHECK_THROWS_AS(c.validate(), Error);
  c.probe_zero = false;
  CHECK_NOTHROW(c.validate());
  c = OptimizationConfig::desk();
  c.mode = EstimationMode::Projective;
  c.estimator_m = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("objective is one at the ideal gate without noise") {
  OptimizationConfig c = OptimizationConfig::desk();
  c.noise = NoiseConfig::none();
  Rng rng = split_stream(4, {});
  CHECK(objective(std::vector<double>(18, 0.0), c, rng) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("noiseless optimization reaches the ideal gate") {
  OptimizationConfig c = OptimizationConfig::desk();
  c.noise = NoiseConfig::none();
  c.seed = 1;
  const OptimizationTrace trace = run_optimization(c);
  CHECK(trace.fidelity_single >= 0.999);
  CHECK(trace.records.size() == 60);
}

TEST_CASE("trace structure and CSV") {
  OptimizationConfig c = OptimizationConfig::desk();
  c.iterations = 12;
  c.initial_probes = 4;
  c.estimator_l = 64;
  c.seed = 5;
  const OptimizationTrace trace = run_optimization(c);
  REQUIRE(trace.records.size() == 12);
  double best = -1e300;
  for (const auto& r : trace.records) {
    best = std::max(best, r.estimate);
    CHECK(c.bounds.contains(r.params));
  }
  CHECK(trace.best_estimate == best);
  CHECK(trace.records[trace.best_index].estimate == best);
  CHECK(trace.records.front().params == std::vector<double>(18, 0.0));
  CHECK(trace.baseline_single == doctest::Approx(0.6187).epsilon(1e-3));

  const auto lines = lines_of(trace_csv(trace));
  REQUIRE(lines.size() == 14);
  CHECK(lines[0].rfind("iteration,param_0,param_1,", 0) == 0);
  CHECK(lines[0].find("param_17,estimate,is_best") != std::string::npos);
  int flagged = 0;
  for (std::size_t i = 1; i <= 12; ++i) {
    CHECK(std::count(lines[i].begin(), lines[i].end(), ',') == 20);
    flagged += lines[i].back() == '1';
  }
  CHECK(flagged == 1);
  CHECK(lines.back().rfind("# summary", 0) == 0);
  CHECK(trace_csv(run_optimization(c)) == trace_csv(trace));
}
