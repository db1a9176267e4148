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

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fidelity_forge/channels.hpp"
#include "fidelity_forge/estimation.hpp"
#include "fidelity_forge/rng.hpp"

namespace ff {

struct ParameterBounds {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t size() const noexcept { return lo.size(); }
  void validate() const;
  bool contains(std::span<const double> x) const;
  std::vector<double> to_unit(std::span<const double> x) const;
  std::vector<double> from_unit(std::span<const double> u) const;

  static ParameterBounds uniform(std::size_t dims, double lo, double hi);
};

struct Observation {
  std::vector<double> params;
  double value = 0.0;
};

/// Gaussian-process surrogate with a squared-exponential kernel and one
/// lengthscale per dimension. Inputs are mapped to the unit cube and outputs
/// standardized before fitting.
class Surrogate {
 public:
  struct Hyperparameters {
    std::vector<double> lengthscales;  // unit-cube coordinates
    double signal_variance = 1.0;      // standardized output units
    double noise_variance = 1e-4;
    double jitter = 0.0;               // extra diagonal needed for Cholesky
    double log_marginal_likelihood = 0.0;
  };
  struct Prediction {
    double mean = 0.0;
    double variance = 0.0;
  };

  /// Maximizes the marginal likelihood over a fixed log-grid: a shared
  /// lengthscale, signal and noise grid first, then one multiplicative pass
  /// per dimension. Needs at least two observations.
  static Surrogate fit(const std::vector<Observation>& observations, const ParameterBounds& bounds);

  Prediction predict(std::span<const double> params) const;
  const Hyperparameters& hyperparameters() const noexcept { return hyper_; }
  const ParameterBounds& bounds() const noexcept { return bounds_; }
  /// True when every observation has the same value, so EI is constant.
  bool flat() const noexcept { return flat_; }
  double best_value() const noexcept { return best_value_; }
  const std::vector<double>& best_params() const noexcept { return best_params_; }

 private:
  ParameterBounds bounds_;
  Hyperparameters hyper_;
  RealMatrix x_;                // observations x dims, unit cube
  RealVector alpha_;            // K^-1 y
  Eigen::LLT<RealMatrix> chol_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  bool flat_ = false;
  double best_value_ = 0.0;
  std::vector<double> best_params_;
};

Surrogate fit_surrogate(const std::vector<Observation>& observations, const ParameterBounds& bounds);

double expected_improvement(double mean, double variance, double best, double xi = 0.0);

struct AcquisitionConfig {
  int candidates = 2048;
  /// Share of candidates placed in a box around the incumbent; the rest cover
  /// the whole domain.
  double local_fraction = 0.5;
  /// Local step widths as fractions of each parameter range.
  std::vector<double> local_radii = {0.02, 0.05, 0.1};
  /// Local candidates move between 1 and this many coordinates.
  int local_coordinates = 1;
};

/// Quasi-random candidate set: a randomly shifted Halton sequence over the
/// domain plus sparse Halton-driven steps around the incumbent.
std::vector<std::vector<double>> acquisition_candidates(const Surrogate& surrogate, const AcquisitionConfig& config,
                                                        Rng& rng);

/// EI argmax over the candidate set; ties go to the lowest candidate index.
std::vector<double> acquire(const Surrogate& surrogate, const AcquisitionConfig& config, Rng& rng);

/// Radical-inverse Halton coordinate for sequence index `index` and prime base.
double halton(std::uint64_t index, int base);

struct BayesianSettings {
  int iterations = 60;
  int initial_probes = 20;
  std::uint64_t seed = 0;
  AcquisitionConfig acquisition;
  /// Evaluated as the first probe when present.
  std::optional<std::vector<double>> first_probe;
};

struct BayesianResult {
  std::vector<Observation> observations;  // in evaluation order
  std::size_t best_index = 0;
};

/// Sequential GP-EI maximization of `objective`. The callback receives the
/// evaluation index so it can derive its own random stream.
BayesianResult maximize(const std::function<double(std::span<const double>, std::size_t)>& objective,
                        const ParameterBounds& bounds, const BayesianSettings& settings);

struct OptimizationConfig {
  int iterations = 140;
  int initial_probes = 20;
  int estimator_l = 160;
  long long estimator_m = 2048;
  EstimationMode mode = EstimationMode::Projective;
  ParameterBounds bounds = ParameterBounds::uniform(kParameterisedCnotParams, -3.141592653589793, 3.141592653589793);
  NoiseConfig noise = NoiseConfig::defaults();
  std::uint64_t seed = 0;
  /// When false every objective evaluation reuses one random stream, so the
  /// same settings and shot sequence score every candidate.
  bool resample_settings = false;
  /// Evaluate the textbook all-zero parameters as the first probe.
  bool probe_zero = true;
  AcquisitionConfig acquisition;

  void validate() const;
  /// 60 iterations, 10 initial probes, full-trace estimator over 32768 settings.
  static OptimizationConfig desk();
};

struct TraceRecord {
  int iteration = 0;
  std::vector<double> params;
  double estimate = 0.0;
  std::size_t evaluation = 0;  // logical timestamp: objective calls so far
};

struct OptimizationTrace {
  std::vector<TraceRecord> records;
  std::size_t best_index = 0;
  std::vector<double> best_params;
  double best_estimate = 0.0;
  double fidelity_single = 0.0;  // exact, best params, vs ideal CNOT(0->2)
  double fidelity_triple = 0.0;  // exact, three applications
  double baseline_single = 0.0;  // same quantities at the all-zero parameters
  double baseline_triple = 0.0;
};

/// 0-fidelity estimate of the noisy parameterised CNOT against the ideal gate.
double objective(std::span<const double> params, const OptimizationConfig& config, Rng& rng);

OptimizationTrace run_optimization(const OptimizationConfig& config);

/// Header, one row per iteration, then a '#' summary line.
std::string trace_csv(const OptimizationTrace& trace);

}  // namespace ff
