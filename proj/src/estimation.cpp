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


#include "fidelity_forge/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "fidelity_forge/errors.hpp"
#include "fidelity_forge/fidelity.hpp"
#include "fidelity_forge/parallel.hpp"

namespace ff {

namespace {

constexpr double kDenominatorCutoff = 1e-12;
constexpr double kClampTolerance = 1e-8;

ComplexMatrix stack_vec(const std::vector<ComplexMatrix>& mats) {
  const auto size = mats.front().size();
  ComplexMatrix out(size, static_cast<Eigen::Index>(mats.size()));
  for (std::size_t i = 0; i < mats.size(); ++i) {
    out.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const ComplexVector>(mats[i].data(), size);
  }
  return out;
}

ComplexMatrix stacked_images(const Channel& ch, const std::vector<ComplexMatrix>& inputs) {
  std::vector<ComplexMatrix> outputs;
  outputs.reserve(inputs.size());
  for (const auto& x : inputs) outputs.push_back(ch(x));
  return stack_vec(outputs);
}

/// T(i, j) = tr[images_i W_j], real because both factors are Hermitian.
RealMatrix expectation_table(const ComplexMatrix& images, const ComplexMatrix& observables) {
  return (images.adjoint() * observables).real();
}

SettingDistribution build_distribution(SettingKind kind, const RealMatrix& denominators, int dim) {
  SettingDistribution dist;
  dist.kind = kind;
  const double d2 = static_cast<double>(dim) * dim;
  std::vector<double> weights;
  for (Eigen::Index i = 0; i < denominators.rows(); ++i) {
    for (Eigen::Index j = 0; j < denominators.cols(); ++j) {
      const double den = denominators(i, j);
      if (std::abs(den) < kDenominatorCutoff) continue;
      dist.entries.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 0.0, den});
      weights.push_back(den * den / d2);
    }
  }
  dist.raw_mass = pairwise_sum(weights);
  if (!(dist.raw_mass >= 1e-9)) {
    throw Error(ErrorCode::DegenerateDistribution, "setting distribution has total mass " + std::to_string(dist.raw_mass));
  }
  dist.cumulative.resize(weights.size());
  double running = 0.0;
  for (std::size_t e = 0; e < weights.size(); ++e) {
    dist.entries[e].probability = weights[e] / dist.raw_mass;
    running += dist.entries[e].probability;
    dist.cumulative[e] = running;
  }
  dist.cumulative.back() = 1.0;
  return dist;
}

std::vector<bool> identity_flags(const SettingDistribution& dist) {
  std::vector<bool> out(dist.entries.size());
  for (std::size_t e = 0; e < dist.entries.size(); ++e) out[e] = dist.entries[e].observable == 0;
  return out;
}

/// Mean of m outcomes of a Pauli observable scaled by 1/sqrt(d), whose exact
/// expectation is `exact`. Outcomes take two levels, so the count of +1
/// outcomes is binomial; this matches m independent inverse-CDF draws in
/// distribution.
double sample_pauli_mean(double exact, int dim, long long m, Rng& rng) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  const double p_plus = std::clamp(0.5 * (1.0 + exact / scale), 0.0, 1.0);
  std::binomial_distribution<long long> draw(m, p_plus);
  const long long plus = draw(rng);
  return scale * static_cast<double>(2 * plus - m) / static_cast<double>(m);
}

bool is_unitary_channel(const Channel& ch) { return ch.kraus().size() == 1 && is_unitary(ch.kraus().front(), 1e-8); }

void require_pair(const Channel& lam, const Channel& gam) {
  if (lam.dim() != gam.dim()) throw Error(ErrorCode::DimensionMismatch, "channels differ in dimension");
}

void require_counts(int l, long long m, EstimationMode mode) {
  if (l < 1) throw Error(ErrorCode::OutOfRange, "l must be at least 1");
  if (mode != EstimationMode::FullTrace && m < 1) throw Error(ErrorCode::OutOfRange, "m must be at least 1");
}

}  // namespace

std::string_view kind_name(SettingKind kind) {
  return kind == SettingKind::ZeroFidelity ? "zero" : "process";
}

std::string_view mode_name(EstimationMode mode) {
  switch (mode) {
    case EstimationMode::FullTrace: return "full_trace";
    case EstimationMode::Projective: return "projective";
    case EstimationMode::ShotByShot: return "shot_by_shot";
  }
  return "unknown";
}

EstimationMode parse_mode(std::string_view text) {
  if (text == "full_trace" || text == "fulltrace") return EstimationMode::FullTrace;
  if (text == "projective") return EstimationMode::Projective;
  if (text == "shot_by_shot") return EstimationMode::ShotByShot;
  throw Error(ErrorCode::InvalidConfig, "unknown estimation mode '" + std::string(text) + "'");
}

std::size_t SettingDistribution::sample(Rng& rng) const {
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

SettingDistribution setting_distribution_zero(const Channel& lam, const HierarchyBasis& basis) {
  if (lam.dim() != basis.dim) throw Error(ErrorCode::DimensionMismatch, "basis and channel differ in dimension");
  const RealMatrix den = expectation_table(sic_images(lam, basis), stack_vec(basis.pauli.observables));
  return build_distribution(SettingKind::ZeroFidelity, den, basis.dim);
}

SettingDistribution setting_distribution_process(const Channel& lam, const PauliBasis& pauli) {
  const ComplexMatrix observables = stack_vec(pauli.observables);
  if (pauli.observables.front().rows() != lam.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "basis and channel differ in dimension");
  }
  const RealMatrix den = expectation_table(stacked_images(lam, pauli.observables), observables);
  return build_distribution(SettingKind::ProcessFidelity, den, static_cast<int>(lam.dim()));
}

ObservableSpectrum observable_spectrum(const Observable& w) {
  HermEigen eig = herm_eig(w);
  return {std::move(eig.eigenvalues), std::move(eig.eigenvectors)};
}

std::vector<double> outcome_probabilities(const DensityMatrix& rho, const ObservableSpectrum& spectrum) {
  if (rho.rows() != spectrum.eigenvectors.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "state and observable differ in dimension");
  }
  const auto count = spectrum.eigenvectors.cols();
  std::vector<double> probs(static_cast<std::size_t>(count));
  double clamped = 0.0;
  for (Eigen::Index k = 0; k < count; ++k) {
    const auto v = spectrum.eigenvectors.col(k);
    double p = v.dot(rho * v).real();
    if (p < 0.0) {
      clamped += -p;
      p = 0.0;
    }
    probs[static_cast<std::size_t>(k)] = p;
  }
  if (clamped > kClampTolerance) {
    throw Error(ErrorCode::InvalidProbabilities, "outcome probabilities lost " + std::to_string(clamped) + " to clamping");
  }
  const double total = pairwise_sum(probs);
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidProbabilities, "outcome probabilities sum to zero");
  for (double& p : probs) p /= total;
  return probs;
}

double measure_expectation(const DensityMatrix& rho, const Observable& w, EstimationMode mode, int m, Rng& rng) {
  if (mode == EstimationMode::FullTrace) {
    if (rho.rows() != w.rows()) throw Error(ErrorCode::DimensionMismatch, "state and observable differ in dimension");
    return frob_inner(w, rho).real();
  }
  return measure_expectation(rho, observable_spectrum(w), mode, m, rng);
}

double measure_expectation(const DensityMatrix& rho, const ObservableSpectrum& spectrum, EstimationMode mode, int m,
                           Rng& rng) {
  if (mode == EstimationMode::FullTrace) {
    const std::vector<double> probs = outcome_probabilities(rho, spectrum);
    double value = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) value += probs[k] * spectrum.eigenvalues(static_cast<Eigen::Index>(k));
    return value;
  }
  if (m < 1) throw Error(ErrorCode::OutOfRange, "projective measurement needs m >= 1");
  const std::vector<double> probs = outcome_probabilities(rho, spectrum);
  std::vector<double> cumulative(probs.size());
  double running = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) cumulative[k] = running += probs[k];
  cumulative.back() = 1.0;
  double sum = 0.0;
  for (int shot = 0; shot < m; ++shot) {
    const double u = uniform01(rng);
    auto k = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    k = std::min(k, probs.size() - 1);
    sum += spectrum.eigenvalues(static_cast<Eigen::Index>(k));
  }
  return sum / m;
}

namespace {

void check_bound_inputs(double f, int d, int l, long long m) {
  if (!(f >= -1e-9 && f <= 1.0 + 1e-9)) throw Error(ErrorCode::OutOfRange, "fidelity must lie in [0, 1]");
  if (d < 1 || l < 1 || m < 0) throw Error(ErrorCode::OutOfRange, "bounds need d >= 1, l >= 1, m >= 0");
}

}  // namespace

VarianceBounds variance_bounds_zero(double f0, int d, int l, long long m) {
  check_bound_inputs(f0, d, l, m);
  const double shot = m == 0 ? 0.0 : static_cast<double>(d) / static_cast<double>(m);
  return {(1.0 - f0 * f0) / l, (1.0 + shot - f0 * f0) / l};
}

VarianceBounds variance_bounds_process(double f, int d, int l, long long m) {
  check_bound_inputs(f, d, l, m);
  const double shot = m == 0 ? 0.0 : static_cast<double>(d) * d / static_cast<double>(m);
  return {(1.0 - f * f) / l, (1.0 + shot - f * f) / l};
}

ZeroFidelityEstimator::ZeroFidelityEstimator(const Channel& lam, const Channel& gam) {
  require_pair(lam, gam);
  dim_ = static_cast<int>(lam.dim());
  const HierarchyBasis& basis = hierarchy_basis(qubits_for_dimension(lam.dim()));
  const ComplexMatrix observables = stack_vec(basis.pauli.observables);
  const ComplexMatrix lam_images = sic_images(lam, basis);
  const RealMatrix den = expectation_table(lam_images, observables);
  dist_ = build_distribution(SettingKind::ZeroFidelity, den, dim_);
  const RealMatrix num = expectation_table(sic_images(gam, basis), observables);
  numerators_.reserve(dist_.entries.size());
  for (const auto& e : dist_.entries) numerators_.push_back(num(e.state, e.observable));
  identity_observable_ = identity_flags(dist_);
  heuristic_ = !is_unitary_channel(lam);
  exact_ = zero_fidelity(lam, gam, basis);
}

EstimateRecord ZeroFidelityEstimator::estimate(int l, long long m, EstimationMode mode, Rng& rng,
                                               bool keep_settings) const {
  require_counts(l, m, mode);
  if (mode == EstimationMode::ShotByShot) {
    throw Error(ErrorCode::InvalidConfig, "shot-by-shot mode applies to process-fidelity estimation only");
  }
  std::vector<std::size_t> picks(static_cast<std::size_t>(l));
  for (auto& p : picks) p = dist_.sample(rng);
  std::vector<double> x(picks.size());
  for (std::size_t s = 0; s < picks.size(); ++s) {
    const std::size_t e = picks[s];
    double measured = numerators_[e];
    if (mode == EstimationMode::Projective && !identity_observable_[e]) {
      measured = sample_pauli_mean(numerators_[e], dim_, m, rng);
    }
    x[s] = measured / dist_.entries[e].denominator;
  }
  EstimateRecord rec;
  rec.kind = SettingKind::ZeroFidelity;
  rec.mode = mode;
  rec.l = l;
  rec.m = mode == EstimationMode::FullTrace ? 0 : m;
  rec.value = pairwise_sum(x) / static_cast<double>(l);
  if (keep_settings) {
    rec.settings.reserve(picks.size());
    for (std::size_t e : picks) rec.settings.push_back({dist_.entries[e].state, dist_.entries[e].observable});
  }
  const VarianceBounds b = variance_bounds_zero(std::clamp(exact_, 0.0, 1.0), dim_, l, rec.m);
  rec.predicted_variance_lo = b.lo;
  rec.predicted_variance_hi = b.hi;
  rec.heuristic = heuristic_;
  return rec;
}

ProcessFidelityEstimator::ProcessFidelityEstimator(const Channel& lam, const Channel& gam) {
  require_pair(lam, gam);
  dim_ = static_cast<int>(lam.dim());
  const int n = qubits_for_dimension(lam.dim());
  const HierarchyBasis& basis = hierarchy_basis(n);
  const auto& paulis = basis.pauli.observables;
  const ComplexMatrix observables = stack_vec(paulis);
  dist_ = build_distribution(SettingKind::ProcessFidelity, expectation_table(stacked_images(lam, paulis), observables),
                             dim_);
  const RealMatrix num = expectation_table(stacked_images(gam, paulis), observables);
  numerators_.reserve(dist_.entries.size());
  for (const auto& e : dist_.entries) numerators_.push_back(num(e.state, e.observable));
  identity_observable_ = identity_flags(dist_);

  // Eigenstate outputs of every input that carries probability.
  const std::size_t inputs = paulis.size();
  const auto d = static_cast<std::size_t>(dim_);
  std::vector<bool> used(inputs, false);
  for (const auto& e : dist_.entries) used[e.state] = true;
  eigenvalues_.assign(inputs * d, 0.0);
  std::vector<RealMatrix> per_input(inputs);
  for (std::size_t i = 0; i < inputs; ++i) {
    const PauliEigenbasis eb = pauli_eigenbasis(basis.pauli.labels[i]);
    for (std::size_t k = 0; k < d; ++k) eigenvalues_[i * d + k] = eb.eigenvalues(static_cast<Eigen::Index>(k));
    if (!used[i]) continue;
    std::vector<ComplexMatrix> projectors;
    projectors.reserve(d);
    for (std::size_t k = 0; k < d; ++k) {
      const auto v = eb.eigenvectors.col(static_cast<Eigen::Index>(k));
      projectors.push_back(v * v.adjoint());
    }
    per_input[i] = expectation_table(stacked_images(gam, projectors), observables);  // d x d^2
  }
  eigen_terms_.resize(dist_.entries.size() * d);
  for (std::size_t e = 0; e < dist_.entries.size(); ++e) {
    const auto& entry = dist_.entries[e];
    for (std::size_t k = 0; k < d; ++k) {
      eigen_terms_[e * d + k] = per_input[entry.state](static_cast<Eigen::Index>(k), entry.observable);
    }
  }
  heuristic_ = !is_unitary_channel(lam);
  exact_ = process_fidelity_exact(lam, gam);
}

const double* ProcessFidelityEstimator::eigen_terms(std::size_t entry) const {
  return eigen_terms_.data() + entry * static_cast<std::size_t>(dim_);
}

EstimateRecord ProcessFidelityEstimator::estimate(int l, long long m, EstimationMode mode, Rng& rng,
                                                  bool keep_settings) const {
  require_counts(l, m, mode);
  if (mode == EstimationMode::Projective && m % dim_ != 0) {
    throw Error(ErrorCode::ShotsNotDivisible,
                "m = " + std::to_string(m) + " is not divisible by d = " + std::to_string(dim_));
  }
  const auto d = static_cast<std::size_t>(dim_);
  EstimateRecord rec;
  rec.kind = SettingKind::ProcessFidelity;
  rec.mode = mode;
  rec.l = l;
  rec.m = mode == EstimationMode::FullTrace ? 0 : m;
  rec.heuristic = heuristic_;

  if (mode == EstimationMode::ShotByShot) {
    // Every one of the l*m shots draws its own setting and eigenstate; the
    // single outcome o is reweighted as d * lambda_k * o / denominator.
    const long long shots = static_cast<long long>(l) * m;
    std::vector<double> x(static_cast<std::size_t>(shots));
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim_));
    for (auto& xs : x) {
      const std::size_t e = dist_.sample(rng);
      const auto k = std::min(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(d)), d - 1);
      const double lambda = eigenvalues_[dist_.entries[e].state * d + k];
      double outcome = scale;
      if (!identity_observable_[e]) {
        const double p_plus = std::clamp(0.5 * (1.0 + eigen_terms(e)[k] / scale), 0.0, 1.0);
        outcome = uniform01(rng) < p_plus ? scale : -scale;
      }
      xs = static_cast<double>(d) * lambda * outcome / dist_.entries[e].denominator;
      if (keep_settings && rec.settings.size() < static_cast<std::size_t>(l)) {
        rec.settings.push_back({dist_.entries[e].state, dist_.entries[e].observable});
      }
    }
    rec.value = pairwise_sum(x) / static_cast<double>(shots);
  } else {
    std::vector<std::size_t> picks(static_cast<std::size_t>(l));
    for (auto& p : picks) p = dist_.sample(rng);
    std::vector<double> x(picks.size());
    const long long per_state = m / dim_;
    for (std::size_t s = 0; s < picks.size(); ++s) {
      const std::size_t e = picks[s];
      double measured = numerators_[e];
      if (mode == EstimationMode::Projective && !identity_observable_[e]) {
        const double* terms = eigen_terms(e);
        const double* lambdas = &eigenvalues_[dist_.entries[e].state * d];
        std::vector<double> parts(d);
        for (std::size_t k = 0; k < d; ++k) parts[k] = lambdas[k] * sample_pauli_mean(terms[k], dim_, per_state, rng);
        measured = pairwise_sum(parts);
      }
      x[s] = measured / dist_.entries[e].denominator;
    }
    rec.value = pairwise_sum(x) / static_cast<double>(l);
    if (keep_settings) {
      rec.settings.reserve(picks.size());
      for (std::size_t e : picks) rec.settings.push_back({dist_.entries[e].state, dist_.entries[e].observable});
    }
  }
  const VarianceBounds b = variance_bounds_process(std::clamp(exact_, 0.0, 1.0), dim_, l, rec.m);
  rec.predicted_variance_lo = b.lo;
  rec.predicted_variance_hi = b.hi;
  return rec;
}

EstimateRecord estimate_zero_fidelity(const Channel& lam, const Channel& gam, int l, long long m,
                                      EstimationMode mode, Rng& rng) {
  return ZeroFidelityEstimator(lam, gam).estimate(l, m, mode, rng);
}

EstimateRecord estimate_process_fidelity(const Channel& lam, const Channel& gam, int l, long long m,
                                         EstimationMode mode, Rng& rng) {
  return ProcessFidelityEstimator(lam, gam).estimate(l, m, mode, rng);
}

double sample_mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return pairwise_sum(values) / static_cast<double>(values.size());
}

double sample_std(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double mean = sample_mean(values);
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(values.size() - 1));
}

std::vector<BenchmarkRow> benchmark_estimators(const Channel& lam, const Channel& gam,
                                               const std::vector<ScheduleRow>& schedule,
                                               const BenchmarkConfig& config) {
  if (config.reps < 2) throw Error(ErrorCode::OutOfRange, "benchmark needs at least 2 repetitions");
  if (config.mode == EstimationMode::ShotByShot) {
    throw Error(ErrorCode::InvalidConfig, "benchmark runs full_trace or projective estimators");
  }
  const ZeroFidelityEstimator zero(lam, gam);
  const ProcessFidelityEstimator process(lam, gam);
  const int d = zero.dim();
  const bool projective = config.mode == EstimationMode::Projective;

  std::vector<BenchmarkRow> rows;
  for (const auto& row : schedule) {
    if (row.process_unique != d * row.process_l) {
      throw Error(ErrorCode::InvalidFixture, "schedule row " + std::to_string(row.total_experiments) +
                                                 ": unique settings must equal d * l");
    }
    if (row.process_unique > config.max_unique_settings) {
      throw Error(ErrorCode::InvalidFixture, "schedule row " + std::to_string(row.total_experiments) +
                                                 " exceeds the unique-setting cap");
    }
    for (SettingKind kind : {SettingKind::ZeroFidelity, SettingKind::ProcessFidelity}) {
      BenchmarkRow out;
      out.budget = row.total_experiments;
      out.kind = kind;
      out.mode = config.mode;
      out.reps = config.reps;
      out.seed = config.seed;
      const bool is_zero = kind == SettingKind::ZeroFidelity;
      out.l = is_zero ? row.zero_l : row.process_l;
      out.unique_settings = is_zero ? row.zero_l : row.process_unique;
      const long long m = is_zero ? row.zero_m : static_cast<long long>(d) * row.process_shots_per_experiment;
      out.m = projective ? m : 0;

      std::vector<double> values(static_cast<std::size_t>(config.reps));
      parallel_for(values.size(), config.threads, [&](std::size_t r) {
        Rng rng = split_stream(config.seed, {static_cast<std::uint64_t>(kind), r});
        values[r] = is_zero ? zero.estimate(out.l, m, config.mode, rng, false).value
                            : process.estimate(out.l, m, config.mode, rng, false).value;
      });
      out.empirical_std = sample_std(values);
      const VarianceBounds b =
          is_zero ? variance_bounds_zero(std::clamp(zero.exact_value(), 0.0, 1.0), d, out.l, out.m)
                  : variance_bounds_process(std::clamp(process.exact_value(), 0.0, 1.0), d, out.l, out.m);
      out.bound_lo_std = std::sqrt(b.lo);
      out.bound_hi_std = std::sqrt(b.hi);
      out.within_band = out.empirical_std >= 0.5 * out.bound_lo_std && out.empirical_std <= 1.5 * out.bound_hi_std;
      rows.push_back(out);
    }
  }
  return rows;
}

std::string benchmark_csv_row(const BenchmarkRow& row) {
  char buf[320];
  std::snprintf(buf, sizeof buf, "%lld,%s,%s,%d,%lld,%d,%.17g,%.17g,%.17g,%d,%llu", row.budget,
                std::string(kind_name(row.kind)).c_str(), std::string(mode_name(row.mode)).c_str(), row.l, row.m,
                row.unique_settings, row.empirical_std, row.bound_lo_std, row.bound_hi_std, row.reps,
                static_cast<unsigned long long>(row.seed));
  return buf;
}

}  // namespace ff
