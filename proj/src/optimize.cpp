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


#include "fidelity_forge/optimize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <numbers>

#include "fidelity_forge/errors.hpp"
#include "fidelity_forge/fidelity.hpp"

namespace ff {

namespace {

constexpr std::array<int, 32> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,  31,  37,  41,  43,  47,  53,
                                         59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

// Stream labels for split_stream.
constexpr std::uint64_t kProbeStream = 1;
constexpr std::uint64_t kAcquireStream = 2;
constexpr std::uint64_t kObjectiveStream = 3;

constexpr double kMaxJitter = 1e-4;

const std::array<double, 7> kLengthscaleGrid = {0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2};
const std::array<double, 3> kSignalGrid = {0.25, 1.0, 4.0};
const std::array<double, 4> kNoiseGrid = {1e-6, 1e-4, 1e-2, 1e-1};
const std::array<double, 4> kLengthscaleMultipliers = {0.25, 0.5, 2.0, 4.0};

RealMatrix kernel_matrix(const RealMatrix& x, const std::vector<double>& ls, double signal) {
  const auto n = x.rows();
  RealMatrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = signal;
    for (Eigen::Index j = 0; j < i; ++j) {
      double s = 0.0;
      for (Eigen::Index d = 0; d < x.cols(); ++d) {
        const double t = (x(i, d) - x(j, d)) / ls[static_cast<std::size_t>(d)];
        s += t * t;
      }
      k(i, j) = k(j, i) = signal * std::exp(-0.5 * s);
    }
  }
  return k;
}

struct Factorization {
  Eigen::LLT<RealMatrix> llt;
  double jitter = 0.0;
  bool ok = false;
};

/// Cholesky of K + noise I, escalating extra jitter from 1e-10 up to 1e-4.
Factorization factorize(const RealMatrix& k, double noise) {
  Factorization f;
  for (double jitter = 0.0; jitter <= kMaxJitter; jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0) {
    RealMatrix a = k;
    a.diagonal().array() += noise + jitter;
    f.llt.compute(a);
    if (f.llt.info() == Eigen::Success) {
      f.jitter = jitter;
      f.ok = true;
      return f;
    }
  }
  return f;
}

double log_marginal_likelihood(const RealMatrix& x, const RealVector& y, const std::vector<double>& ls, double signal,
                               double noise) {
  const Factorization f = factorize(kernel_matrix(x, ls, signal), noise);
  if (!f.ok) return -std::numeric_limits<double>::infinity();
  const RealVector alpha = f.llt.solve(y);
  const RealMatrix l = f.llt.matrixL();
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  return -0.5 * y.dot(alpha) - 0.5 * log_det - 0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

void ParameterBounds::validate() const {
  if (lo.size() != hi.size() || lo.empty()) throw Error(ErrorCode::InvalidConfig, "bounds need matching nonempty lo/hi");
  for (std::size_t d = 0; d < lo.size(); ++d) {
    if (!(lo[d] < hi[d])) throw Error(ErrorCode::InvalidConfig, "bound " + std::to_string(d) + " has lo >= hi");
  }
}

bool ParameterBounds::contains(std::span<const double> x) const {
  if (x.size() != lo.size()) return false;
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (!(x[d] >= lo[d] && x[d] <= hi[d])) return false;
  }
  return true;
}

std::vector<double> ParameterBounds::to_unit(std::span<const double> x) const {
  std::vector<double> u(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) u[d] = (x[d] - lo[d]) / (hi[d] - lo[d]);
  return u;
}

std::vector<double> ParameterBounds::from_unit(std::span<const double> u) const {
  std::vector<double> x(u.size());
  for (std::size_t d = 0; d < u.size(); ++d) x[d] = std::clamp(lo[d] + u[d] * (hi[d] - lo[d]), lo[d], hi[d]);
  return x;
}

ParameterBounds ParameterBounds::uniform(std::size_t dims, double lo, double hi) {
  return {std::vector<double>(dims, lo), std::vector<double>(dims, hi)};
}

Surrogate Surrogate::fit(const std::vector<Observation>& observations, const ParameterBounds& bounds) {
  bounds.validate();
  if (observations.size() < 2) throw Error(ErrorCode::OutOfRange, "surrogate needs at least two observations");
  const auto n = static_cast<Eigen::Index>(observations.size());
  const auto dims = static_cast<Eigen::Index>(bounds.size());

  Surrogate s;
  s.bounds_ = bounds;
  s.x_.resize(n, dims);
  RealVector y(n);
  std::size_t best = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& obs = observations[static_cast<std::size_t>(i)];
    if (obs.params.size() != bounds.size()) throw Error(ErrorCode::DimensionMismatch, "observation has wrong dimension");
    const std::vector<double> u = bounds.to_unit(obs.params);
    for (Eigen::Index d = 0; d < dims; ++d) s.x_(i, d) = u[static_cast<std::size_t>(d)];
    y(i) = obs.value;
    if (obs.value > observations[best].value) best = static_cast<std::size_t>(i);
  }
  s.best_value_ = observations[best].value;
  s.best_params_ = observations[best].params;

  // Prior mean at the worst observation: unexplored regions are assumed poor.
  s.y_mean_ = y.minCoeff();
  const double spread = y.maxCoeff() - y.minCoeff();
  s.flat_ = spread == 0.0;
  const double var = (y.array() - y.mean()).square().mean();
  s.y_scale_ = var > 0.0 ? std::sqrt(var) : 1.0;
  const RealVector z = (y.array() - s.y_mean_) / s.y_scale_;

  // Shared lengthscale with signal and noise levels, then per-dimension refinement.
  Hyperparameters h;
  h.log_marginal_likelihood = -std::numeric_limits<double>::infinity();
  for (double ls : kLengthscaleGrid) {
    for (double signal : kSignalGrid) {
      for (double noise : kNoiseGrid) {
        std::vector<double> lengths(static_cast<std::size_t>(dims), ls);
        const double lml = log_marginal_likelihood(s.x_, z, lengths, signal, noise);
        if (lml > h.log_marginal_likelihood) {
          h.lengthscales = lengths;
          h.signal_variance = signal;
          h.noise_variance = noise;
          h.log_marginal_likelihood = lml;
        }
      }
    }
  }
  if (!std::isfinite(h.log_marginal_likelihood)) {
    throw Error(ErrorCode::IllConditionedKernel, "no grid point gave a positive definite kernel");
  }
  for (Eigen::Index d = 0; d < dims; ++d) {
    const double base = h.lengthscales[static_cast<std::size_t>(d)];
    for (double mult : kLengthscaleMultipliers) {
      std::vector<double> lengths = h.lengthscales;
      lengths[static_cast<std::size_t>(d)] = base * mult;
      const double lml = log_marginal_likelihood(s.x_, z, lengths, h.signal_variance, h.noise_variance);
      if (lml > h.log_marginal_likelihood) {
        h.lengthscales = lengths;
        h.log_marginal_likelihood = lml;
      }
    }
  }

  Factorization f = factorize(kernel_matrix(s.x_, h.lengthscales, h.signal_variance), h.noise_variance);
  if (!f.ok) throw Error(ErrorCode::IllConditionedKernel, "Cholesky failed after jitter escalation to 1e-4");
  h.jitter = f.jitter;
  s.chol_ = std::move(f.llt);
  s.alpha_ = s.chol_.solve(z);
  s.hyper_ = std::move(h);
  return s;
}

Surrogate::Prediction Surrogate::predict(std::span<const double> params) const {
  if (params.size() != bounds_.size()) throw Error(ErrorCode::DimensionMismatch, "query has wrong dimension");
  const std::vector<double> u = bounds_.to_unit(params);
  const auto n = x_.rows();
  RealVector k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index d = 0; d < x_.cols(); ++d) {
      const double t = (u[static_cast<std::size_t>(d)] - x_(i, d)) / hyper_.lengthscales[static_cast<std::size_t>(d)];
      s += t * t;
    }
    k(i) = hyper_.signal_variance * std::exp(-0.5 * s);
  }
  const RealVector v = chol_.matrixL().solve(k);
  const double latent_var = std::max(0.0, hyper_.signal_variance - v.squaredNorm());
  return {y_mean_ + y_scale_ * k.dot(alpha_), y_scale_ * y_scale_ * latent_var};
}

Surrogate fit_surrogate(const std::vector<Observation>& observations, const ParameterBounds& bounds) {
  return Surrogate::fit(observations, bounds);
}

double expected_improvement(double mean, double variance, double best, double xi) {
  const double gain = mean - best - xi;
  const double sigma = std::sqrt(std::max(variance, 0.0));
  if (sigma < 1e-12) return std::max(gain, 0.0);
  const double z = gain / sigma;
  return gain * normal_cdf(z) + sigma * normal_pdf(z);
}

double halton(std::uint64_t index, int base) {
  double f = 1.0;
  double r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
  }
  return r;
}

std::vector<std::vector<double>> acquisition_candidates(const Surrogate& surrogate, const AcquisitionConfig& config,
                                                        Rng& rng) {
  const std::size_t dims = surrogate.bounds().size();
  if (dims > kPrimes.size()) throw Error(ErrorCode::OutOfRange, "too many dimensions for the Halton sequence");
  if (config.candidates < 1) throw Error(ErrorCode::InvalidConfig, "need at least one candidate");
  const auto total = static_cast<std::size_t>(config.candidates);
  const auto local = config.local_radii.empty()
                         ? std::size_t{0}
                         : std::min(total, static_cast<std::size_t>(std::lround(config.local_fraction * total)));
  const std::size_t global = total - local;

  std::vector<double> shift(dims);
  for (double& s : shift) s = uniform01(rng);
  std::vector<std::vector<double>> out;
  out.reserve(total);
  std::vector<double> u(dims);
  for (std::size_t t = 0; t < global; ++t) {
    for (std::size_t d = 0; d < dims; ++d) {
      const double h = halton(t + 1, kPrimes[d]) + shift[d];
      u[d] = h - std::floor(h);
    }
    out.push_back(surrogate.bounds().from_unit(u));
  }

  const std::vector<double> centre = surrogate.bounds().to_unit(surrogate.best_params());
  const std::size_t max_moved = std::clamp<std::size_t>(static_cast<std::size_t>(config.local_coordinates), 1, dims);
  std::vector<std::size_t> order(dims);
  for (std::size_t t = 0; t < local; ++t) {
    const double radius = config.local_radii[t % config.local_radii.size()];
    u = centre;
    // Partial Fisher-Yates picks 1..max_moved distinct coordinates.
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t moved = 1 + t / config.local_radii.size() % max_moved;
    for (std::size_t k = 0; k < moved; ++k) {
      const auto j = k + std::min(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(dims - k)), dims - k - 1);
      std::swap(order[k], order[j]);
      const std::size_t d = order[k];
      const double h = halton(global + t + 1, kPrimes[k]) + shift[d];
      u[d] = std::clamp(centre[d] + (2.0 * (h - std::floor(h)) - 1.0) * radius, 0.0, 1.0);
    }
    out.push_back(surrogate.bounds().from_unit(u));
  }
  return out;
}

std::vector<double> acquire(const Surrogate& surrogate, const AcquisitionConfig& config, Rng& rng) {
  std::vector<std::vector<double>> candidates = acquisition_candidates(surrogate, config, rng);
  if (surrogate.flat()) return std::move(candidates.front());
  std::size_t best = 0;
  double best_ei = -1.0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto p = surrogate.predict(candidates[c]);
    const double ei = expected_improvement(p.mean, p.variance, surrogate.best_value());
    if (ei > best_ei) {
      best_ei = ei;
      best = c;
    }
  }
  return std::move(candidates[best]);
}

BayesianResult maximize(const std::function<double(std::span<const double>, std::size_t)>& objective,
                        const ParameterBounds& bounds, const BayesianSettings& settings) {
  bounds.validate();
  if (settings.initial_probes < 1 || settings.iterations < settings.initial_probes) {
    throw Error(ErrorCode::InvalidConfig, "need 1 <= initial probes <= iterations");
  }
  if (settings.first_probe && !bounds.contains(*settings.first_probe)) {
    throw Error(ErrorCode::InvalidConfig, "first probe lies outside the bounds");
  }
  Rng probe_rng = split_stream(settings.seed, {kProbeStream});
  Rng acquire_rng = split_stream(settings.seed, {kAcquireStream});
  BayesianResult result;
  for (int it = 0; it < settings.iterations; ++it) {
    std::vector<double> x;
    if (it == 0 && settings.first_probe) {
      x = *settings.first_probe;
    } else if (it < std::max(settings.initial_probes, 2)) {
      // The surrogate needs two observations, so a single probe is topped up.
      x.resize(bounds.size());
      for (std::size_t d = 0; d < x.size(); ++d) x[d] = uniform(probe_rng, bounds.lo[d], bounds.hi[d]);
    } else {
      x = acquire(Surrogate::fit(result.observations, bounds), settings.acquisition, acquire_rng);
    }
    const double value = objective(x, static_cast<std::size_t>(it));
    result.observations.push_back({std::move(x), value});
    if (value > result.observations[result.best_index].value) result.best_index = result.observations.size() - 1;
  }
  return result;
}

void OptimizationConfig::validate() const {
  if (initial_probes < 1 || iterations < initial_probes) {
    throw Error(ErrorCode::InvalidConfig, "need 1 <= initial_probes <= iterations");
  }
  if (estimator_l < 1) throw Error(ErrorCode::InvalidConfig, "estimator l must be at least 1");
  if (mode == EstimationMode::ShotByShot) throw Error(ErrorCode::InvalidConfig, "objective uses full_trace or projective");
  if (mode == EstimationMode::Projective && estimator_m < 1) {
    throw Error(ErrorCode::InvalidConfig, "projective estimator needs m >= 1");
  }
  bounds.validate();
  if (bounds.size() != kParameterisedCnotParams) {
    throw Error(ErrorCode::InvalidConfig, "parameterised CNOT has 18 parameters");
  }
  if (probe_zero && !bounds.contains(std::vector<double>(kParameterisedCnotParams, 0.0))) {
    throw Error(ErrorCode::InvalidConfig, "zero probe lies outside the bounds");
  }
  noise.validate();
}

OptimizationConfig OptimizationConfig::desk() {
  OptimizationConfig c;
  c.iterations = 60;
  c.initial_probes = 10;
  c.estimator_l = 32768;
  c.mode = EstimationMode::FullTrace;
  return c;
}

double objective(std::span<const double> params, const OptimizationConfig& config, Rng& rng) {
  const Channel ideal = unitary_channel(ideal_cnot_02());
  const Channel noisy = noisy_backend(parameterised_cnot_spec(params), config.noise);
  const ZeroFidelityEstimator estimator(ideal, noisy);
  return estimator.estimate(config.estimator_l, config.estimator_m, config.mode, rng, false).value;
}

OptimizationTrace run_optimization(const OptimizationConfig& config) {
  config.validate();
  BayesianSettings settings;
  settings.iterations = config.iterations;
  settings.initial_probes = config.initial_probes;
  settings.seed = config.seed;
  settings.acquisition = config.acquisition;
  if (config.probe_zero) settings.first_probe = std::vector<double>(kParameterisedCnotParams, 0.0);

  auto evaluate = [&](std::span<const double> params, std::size_t index) {
    Rng rng = config.resample_settings ? split_stream(config.seed, {kObjectiveStream, index})
                                       : split_stream(config.seed, {kObjectiveStream});
    return objective(params, config, rng);
  };
  const BayesianResult result = maximize(evaluate, config.bounds, settings);

  OptimizationTrace trace;
  for (std::size_t i = 0; i < result.observations.size(); ++i) {
    trace.records.push_back({static_cast<int>(i), result.observations[i].params, result.observations[i].value, i + 1});
  }
  trace.best_index = result.best_index;
  trace.best_params = result.observations[result.best_index].params;
  trace.best_estimate = result.observations[result.best_index].value;

  const Channel ideal = unitary_channel(ideal_cnot_02());
  auto exact = [&](std::span<const double> params, double& single, double& triple) {
    const Channel noisy = noisy_backend(parameterised_cnot_spec(params), config.noise);
    single = process_fidelity_exact(ideal, noisy);
    triple = process_fidelity_exact(ideal, repeat(noisy, 3));
  };
  exact(trace.best_params, trace.fidelity_single, trace.fidelity_triple);
  exact(std::vector<double>(kParameterisedCnotParams, 0.0), trace.baseline_single, trace.baseline_triple);
  return trace;
}

std::string trace_csv(const OptimizationTrace& trace) {
  std::string out = "iteration";
  const std::size_t dims = trace.records.empty() ? 0 : trace.records.front().params.size();
  for (std::size_t d = 0; d < dims; ++d) out += ",param_" + std::to_string(d);
  out += ",estimate,is_best\n";
  char buf[64];
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    out += std::to_string(r.iteration);
    for (double p : r.params) {
      std::snprintf(buf, sizeof buf, ",%.17g", p);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g,%d\n", r.estimate, i == trace.best_index ? 1 : 0);
    out += buf;
  }
  char summary[512];
  std::snprintf(summary, sizeof summary,
                "# summary best_iteration=%zu best_estimate=%.17g fidelity_single=%.17g fidelity_triple=%.17g "
                "baseline_single=%.17g baseline_triple=%.17g\n",
                trace.best_index, trace.best_estimate, trace.fidelity_single, trace.fidelity_triple,
                trace.baseline_single, trace.baseline_triple);
  out += summary;
  return out;
}

}  // namespace ff
