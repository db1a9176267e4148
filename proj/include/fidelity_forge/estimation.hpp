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
#include <string_view>
#include <utility>
#include <vector>

#include "fidelity_forge/basis.hpp"
#include "fidelity_forge/channels.hpp"
#include "fidelity_forge/fixtures.hpp"
#include "fidelity_forge/rng.hpp"

namespace ff {

enum class SettingKind { ZeroFidelity, ProcessFidelity };

enum class EstimationMode {
  FullTrace,   // each sampled expectation value is known exactly
  Projective,  // expectation values are means of single-shot eigenvalue outcomes
  ShotByShot,  // process kind only: a fresh setting for every shot; not NISQ-realizable
};

std::string_view kind_name(SettingKind kind);
std::string_view mode_name(EstimationMode mode);
EstimationMode parse_mode(std::string_view text);

struct SettingEntry {
  std::uint32_t state = 0;       // index of rho_i (zero kind) or sigma_i (process kind)
  std::uint32_t observable = 0;  // index of W_j in the Pauli basis
  double probability = 0.0;      // renormalized
  double denominator = 0.0;      // tr[lam(input) W_j]
};

/// Joint distribution over (input, observable) pairs with probability
/// proportional to tr[lam(input) W_j]^2. Pairs with |denominator| < 1e-12 are
/// dropped and the rest renormalized to sum to 1.
struct SettingDistribution {
  SettingKind kind = SettingKind::ZeroFidelity;
  std::vector<SettingEntry> entries;
  std::vector<double> cumulative;  // cumulative[e] = sum of probabilities up to e; last entry is 1
  double raw_mass = 0.0;           // sum of tr[.]^2 / d^2 before renormalization; 1 for unitary lam

  /// Inverse-CDF draw consuming exactly one uniform variate.
  std::size_t sample(Rng& rng) const;
};

SettingDistribution setting_distribution_zero(const Channel& lam, const HierarchyBasis& basis);
SettingDistribution setting_distribution_process(const Channel& lam, const PauliBasis& pauli);

/// Eigen-decomposition of an observable, reusable across measurements.
struct ObservableSpectrum {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
};
ObservableSpectrum observable_spectrum(const Observable& w);

/// Outcome probabilities <phi_k| rho |phi_k>, clamped at zero and renormalized.
/// Throws InvalidProbabilities if more than 1e-8 of mass had to be clamped.
std::vector<double> outcome_probabilities(const DensityMatrix& rho, const ObservableSpectrum& spectrum);

/// FullTrace returns tr[rho w]. Projective draws m outcomes by inverse CDF over
/// the eigenbasis of w and returns the mean eigenvalue.
double measure_expectation(const DensityMatrix& rho, const Observable& w, EstimationMode mode, int m, Rng& rng);
double measure_expectation(const DensityMatrix& rho, const ObservableSpectrum& spectrum, EstimationMode mode, int m,
                           Rng& rng);

struct VarianceBounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// (1 - f0^2)/l <= var <= (1 + d/m - f0^2)/l. Pass m = 0 for the full-trace
/// limit, where the shot-noise term vanishes.
VarianceBounds variance_bounds_zero(double f0, int d, int l, long long m);
/// (1 - f^2)/l <= var <= (1 + d^2/m - f^2)/l with m the total shots per
/// setting, shared by the d eigenstate preparations. m = 0 as above.
VarianceBounds variance_bounds_process(double f, int d, int l, long long m);

struct SettingIndex {
  std::uint32_t state = 0;
  std::uint32_t observable = 0;
};

struct EstimateRecord {
  SettingKind kind = SettingKind::ZeroFidelity;
  EstimationMode mode = EstimationMode::FullTrace;
  int l = 0;
  long long m = 0;
  double value = 0.0;
  std::vector<SettingIndex> settings;
  double predicted_variance_lo = 0.0;
  double predicted_variance_hi = 0.0;
  std::uint64_t rng_seed = 0;
  bool heuristic = false;  // target not unitary, so unbiasedness is not guaranteed
};

/// Importance-sampled estimator of the 0-fidelity. Denominators come from the
/// known target and numerators from the implemented channel; both are
/// tabulated once so repeated estimates are cheap.
class ZeroFidelityEstimator {
 public:
  ZeroFidelityEstimator(const Channel& lam, const Channel& gam);

  const SettingDistribution& distribution() const noexcept { return dist_; }
  double exact_value() const noexcept { return exact_; }
  int dim() const noexcept { return dim_; }

  /// Draws all l settings first, then the shots for each in order.
  EstimateRecord estimate(int l, long long m, EstimationMode mode, Rng& rng, bool keep_settings = true) const;

 private:
  int dim_ = 0;
  bool heuristic_ = false;
  double exact_ = 0.0;
  SettingDistribution dist_;
  std::vector<double> numerators_;  // tr[gam(rho_i) W_j] per entry
  std::vector<bool> identity_observable_;
};

/// Importance-sampled estimator of the process fidelity. Each sampled Pauli
/// input is prepared through its eigenstates; projective mode splits the m
/// shots of a setting evenly over the d eigenstates.
class ProcessFidelityEstimator {
 public:
  ProcessFidelityEstimator(const Channel& lam, const Channel& gam);

  const SettingDistribution& distribution() const noexcept { return dist_; }
  double exact_value() const noexcept { return exact_; }
  int dim() const noexcept { return dim_; }

  EstimateRecord estimate(int l, long long m, EstimationMode mode, Rng& rng, bool keep_settings = true) const;

 private:
  /// tr[gam(|phi_k><phi_k|) W_j] for the eigenstates phi_k of input `state`.
  const double* eigen_terms(std::size_t entry) const;

  int dim_ = 0;
  bool heuristic_ = false;
  double exact_ = 0.0;
  SettingDistribution dist_;
  std::vector<double> numerators_;    // tr[gam(sigma_i) W_j] per entry
  std::vector<double> eigen_terms_;   // entries x d
  std::vector<double> eigenvalues_;   // inputs x d, eigenvalues of sigma_i
  std::vector<bool> identity_observable_;
};

EstimateRecord estimate_zero_fidelity(const Channel& lam, const Channel& gam, int l, long long m,
                                      EstimationMode mode, Rng& rng);
EstimateRecord estimate_process_fidelity(const Channel& lam, const Channel& gam, int l, long long m,
                                         EstimationMode mode, Rng& rng);

struct BenchmarkConfig {
  int reps = 500;
  EstimationMode mode = EstimationMode::Projective;
  std::uint64_t seed = 0;
  int threads = 1;
  int max_unique_settings = 900;
};

struct BenchmarkRow {
  long long budget = 0;
  SettingKind kind = SettingKind::ZeroFidelity;
  EstimationMode mode = EstimationMode::Projective;
  int l = 0;
  long long m = 0;  // shots per setting; for the process kind this covers all d eigenstates
  int unique_settings = 0;
  double empirical_std = 0.0;
  double bound_lo_std = 0.0;
  double bound_hi_std = 0.0;
  int reps = 0;
  std::uint64_t seed = 0;
  bool within_band = true;  // empirical std in [0.5 lo, 1.5 hi]
};

/// Runs `reps` estimates of both kinds for every schedule row. Repetition r of
/// a kind uses the stream derived from (seed, kind, r) in every row, so rows
/// differ only through their (l, m) allocations.
std::vector<BenchmarkRow> benchmark_estimators(const Channel& lam, const Channel& gam,
                                               const std::vector<ScheduleRow>& schedule,
                                               const BenchmarkConfig& config);

inline constexpr std::string_view kBenchmarkCsvHeader =
    "budget,kind,mode,l,m,unique_settings,empirical_std,bound_lo_std,bound_hi_std,reps,seed";
std::string benchmark_csv_row(const BenchmarkRow& row);

/// Sample standard deviation with pairwise-summed moments.
double sample_std(const std::vector<double>& values);
double sample_mean(const std::vector<double>& values);

}  // namespace ff
