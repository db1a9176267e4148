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

#include "fidelity_forge/commands.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <numbers>

#include "fidelity_forge/errors.hpp"
#include "fidelity_forge/estimation.hpp"
#include "fidelity_forge/fixtures.hpp"
#include "fidelity_forge/optimize.hpp"
#include "fidelity_forge/parallel.hpp"

namespace ff {
namespace {

constexpr std::uint64_t kSweepGeneratorStream = 11;
constexpr std::uint64_t kSweepTargetStream = 12;

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::uint64_t parse_seed_suffix(std::string_view source, std::string_view digits) {
  std::uint64_t k = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
  if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw Error(ErrorCode::InvalidConfig, "bad seed in channel source '" + std::string(source) + "'");
  }
  return k;
}

// 0 when `source` is not of the form table<N>.
int table_number(std::string_view source) {
  if (!starts_with(source, "table") || source.size() != 6) return 0;
  const char c = source[5];
  return c >= '1' && c <= '9' ? c - '0' : 0;
}

ChannelSource from_unitary(ComplexMatrix u) {
  Channel ch = unitary_channel(u);
  return {std::move(ch), std::move(u)};
}

std::string join_row(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_real(values[i]);
  }
  return out + "\n";
}

std::string fidelity_header(std::string first, int n_qubits) {
  first += ",F,F0";
  for (int k = 1; k <= n_qubits; ++k) first += ",F" + std::to_string(k);
  return first + "\n";
}

std::vector<double> profile_values(const FidelityProfile& p) {
  std::vector<double> v{p.process, p.zero};
  v.insert(v.end(), p.k_fidelities.begin() + 1, p.k_fidelities.end());
  return v;
}

int checked_int(const RunConfig& cfg, const std::string& key, long long lo, long long hi) {
  const long long v = cfg.integer(key);
  if (v < lo || v > hi) {
    throw Error(ErrorCode::InvalidConfig,
                key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " + std::to_string(v));
  }
  return static_cast<int>(v);
}

std::string run_exact(const RunConfig& cfg) {
  const int n = checked_int(cfg, "exact.qubits", 1, kMaxQubits);
  const ChannelSource target = resolve_channel_source(cfg.text("exact.target"), n, nullptr);
  const ChannelSource compare =
      resolve_channel_source(cfg.text("exact.compare"), n, target.unitary ? &*target.unitary : nullptr);
  if (target.channel.dim() != compare.channel.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "target and comparison channels act on different qubit counts");
  }
  int qubits = 0;
  while ((Eigen::Index{1} << qubits) < target.channel.dim()) ++qubits;
  const FidelityProfile p = fidelity_profile(target.channel, compare.channel, hierarchy_basis(qubits));
  std::string out = "quantity,value\n";
  const std::vector<double> values = profile_values(p);
  out += "F," + format_real(values[0]) + "\n";
  for (std::size_t k = 1; k < values.size(); ++k) out += "F" + std::to_string(k - 1) + "," + format_real(values[k]) + "\n";
  return out;
}

std::string run_sweep(const RunConfig& cfg) {
  SweepConfig sc;
  sc.qubits = checked_int(cfg, "sweep.qubits", 1, 5);
  sc.samples = checked_int(cfg, "sweep.samples", 1, 1000000);
  sc.target = cfg.text("sweep.target");
  sc.eps_min = cfg.real("sweep.eps_min");
  sc.eps_max = cfg.real("sweep.eps_max");
  sc.seed = cfg.unsigned_integer("seed");
  sc.threads = static_cast<int>(cfg.integer("threads"));
  std::string out = fidelity_header("epsilon", sc.qubits);
  for (const SweepRow& row : fidelity_sweep(sc)) {
    std::vector<double> values{row.epsilon};
    const std::vector<double> p = profile_values(row.profile);
    values.insert(values.end(), p.begin(), p.end());
    out += join_row(values);
  }
  return out;
}

std::string run_benchmark(const RunConfig& cfg, bool& sanity_failed) {
  const int n = checked_int(cfg, "benchmark.qubits", 1, kMaxQubits);
  const ChannelSource target = resolve_channel_source(cfg.text("benchmark.target"), n, nullptr);
  const ChannelSource compare =
      resolve_channel_source(cfg.text("benchmark.compare"), n, target.unitary ? &*target.unitary : nullptr);
  BenchmarkConfig bc;
  bc.reps = checked_int(cfg, "benchmark.reps", 10, 10000000);
  bc.mode = parse_mode(cfg.text("benchmark.mode"));
  bc.seed = cfg.unsigned_integer("seed");
  bc.threads = static_cast<int>(cfg.integer("threads"));
  bc.max_unique_settings = checked_int(cfg, "benchmark.max_unique_settings", 1, 1 << 30);
  const std::string& schedule_source = cfg.text("benchmark.schedule");
  const std::vector<ScheduleRow> schedule =
      schedule_source == "bundled" ? budget_schedule() : parse_schedule(read_text_file(schedule_source));
  std::string out = std::string(kBenchmarkCsvHeader) + "\n";
  for (const BenchmarkRow& row : benchmark_estimators(target.channel, compare.channel, schedule, bc)) {
    out += benchmark_csv_row(row) + "\n";
    if (!row.within_band) sanity_failed = true;
  }
  return out;
}

OptimizationConfig optimization_from(const RunConfig& cfg) {
  OptimizationConfig oc = OptimizationConfig::desk();
  oc.iterations = checked_int(cfg, "optimize.iterations", 1, 100000);
  oc.initial_probes = checked_int(cfg, "optimize.initial_probes", 1, 100000);
  oc.estimator_l = checked_int(cfg, "optimize.estimator.l", 1, 1 << 30);
  oc.estimator_m = cfg.integer("optimize.estimator.m");
  oc.mode = parse_mode(cfg.text("optimize.estimator.mode"));
  oc.bounds = ParameterBounds::uniform(kParameterisedCnotParams, cfg.real("optimize.bounds.lo"),
                                       cfg.real("optimize.bounds.hi"));
  oc.noise = {cfg.real("optimize.noise.depolarizing_1q"), cfg.real("optimize.noise.depolarizing_2q"),
              cfg.real("optimize.noise.coherent_zz_angle")};
  oc.seed = cfg.unsigned_integer("seed");
  oc.resample_settings = cfg.boolean("optimize.resample_settings");
  oc.probe_zero = cfg.boolean("optimize.probe_zero");
  oc.acquisition.candidates = checked_int(cfg, "optimize.acquisition.candidates", 1, 1 << 20);
  oc.acquisition.local_fraction = cfg.real("optimize.acquisition.local_fraction");
  if (!(oc.acquisition.local_fraction >= 0.0 && oc.acquisition.local_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "optimize.acquisition.local_fraction must lie in [0, 1]");
  }
  oc.validate();
  return oc;
}

void set_noise(RunConfig& cfg, const NoiseConfig& noise) {
  cfg.set("optimize.noise.depolarizing_1q", format_real(noise.depolarizing_1q));
  cfg.set("optimize.noise.depolarizing_2q", format_real(noise.depolarizing_2q));
  cfg.set("optimize.noise.coherent_zz_angle", format_real(noise.coherent_zz_angle));
}

// Flag values are routed through RunConfig::set so they get the same
// validation and canonical form as file entries.
struct FlagBinding {
  std::string value;
  std::string key;
  CLI::App* owner = nullptr;
  CLI::Option* option = nullptr;
};

}  // namespace

ComplexMatrix hermitian_from_source(std::string_view source, int n_qubits) {
  if (starts_with(source, "seed:")) {
    Rng rng = split_stream(parse_seed_suffix(source, source.substr(5)), {});
    return random_hermitian(n_qubits, rng).matrix;
  }
  const int table = table_number(source);
  if (table >= 1 && table <= 5) {
    const RandomHermitianCoeffs coeffs = hermitian_table(table);
    if (coeffs.n_qubits != n_qubits) {
      throw Error(ErrorCode::InvalidConfig, "'" + std::string(source) + "' has " + std::to_string(coeffs.n_qubits) +
                                                " qubits, expected " + std::to_string(n_qubits));
    }
    return hermitian_from_coeffs(coeffs);
  }
  throw Error(ErrorCode::InvalidConfig,
              "'" + std::string(source) + "' does not name a Hermitian generator (use table1..table5 or seed:<k>)");
}

namespace {

ChannelSource resolve_any_size(std::string_view source, int n_qubits, const ComplexMatrix* base) {
  if (starts_with(source, "perturb:")) {
    const std::string_view rest = source.substr(8);
    const auto split = rest.rfind(":eps=");
    if (split == std::string_view::npos) {
      throw Error(ErrorCode::InvalidConfig, "perturb source needs ':eps=<x>': '" + std::string(source) + "'");
    }
    const std::string_view eps_text = rest.substr(split + 5);
    double eps = 0.0;
    auto [ptr, ec] = std::from_chars(eps_text.data(), eps_text.data() + eps_text.size(), eps);
    if (eps_text.empty() || ec != std::errc{} || ptr != eps_text.data() + eps_text.size() || !std::isfinite(eps)) {
      throw Error(ErrorCode::InvalidConfig, "bad eps in '" + std::string(source) + "'");
    }
    if (base == nullptr) throw Error(ErrorCode::InvalidConfig, "perturb needs a unitary target channel");
    return from_unitary(perturbed_unitary(*base, hermitian_from_source(rest.substr(0, split), n_qubits), eps));
  }
  if (starts_with(source, "seed:")) return from_unitary(expm_minus_i(hermitian_from_source(source, n_qubits), 1.0));
  if (starts_with(source, "circuit:")) {
    return from_unitary(circuit_unitary(parse_circuit(read_text_file(std::string(source.substr(8))))));
  }
  const int table = table_number(source);
  if (table >= 1 && table <= 5) return from_unitary(expm_minus_i(hermitian_from_source(source, n_qubits), 1.0));
  if (table == 6 || table == 7) return from_unitary(circuit_unitary(circuit_from_table(source)));
  throw Error(ErrorCode::InvalidConfig, "unknown channel source '" + std::string(source) + "'");
}

}  // namespace

ChannelSource resolve_channel_source(std::string_view source, int n_qubits, const ComplexMatrix* base) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw Error(ErrorCode::InvalidConfig, "qubit count must lie in [1, " + std::to_string(kMaxQubits) + "]");
  }
  ChannelSource out = resolve_any_size(source, n_qubits, base);
  if (out.channel.dim() != (Eigen::Index{1} << n_qubits)) {
    throw Error(ErrorCode::InvalidConfig, "'" + std::string(source) + "' does not act on " + std::to_string(n_qubits) +
                                              " qubits");
  }
  return out;
}

std::vector<SweepRow> fidelity_sweep(const SweepConfig& config) {
  if (config.qubits < 1 || config.qubits > 5) throw Error(ErrorCode::InvalidConfig, "sweep supports 1..5 qubits");
  if (config.samples < 1) throw Error(ErrorCode::InvalidConfig, "sweep needs at least one sample");
  if (!(config.eps_min <= config.eps_max)) throw Error(ErrorCode::InvalidConfig, "sweep needs eps_min <= eps_max");
  const HierarchyBasis& basis = hierarchy_basis(config.qubits);

  std::string target = config.target;
  if (target == "auto") target = config.qubits == 2 ? "table2" : config.qubits == 3 ? "table3" : "random";
  const bool fresh_target = target == "random";
  std::optional<ChannelSource> fixed;
  ComplexMatrix fixed_images;
  if (!fresh_target) {
    fixed = resolve_channel_source(target, config.qubits, nullptr);
    if (!fixed->unitary || fixed->channel.dim() != basis.dim) {
      throw Error(ErrorCode::InvalidConfig, "sweep target must be a unitary on " + std::to_string(config.qubits) + " qubits");
    }
    fixed_images = sic_images(fixed->channel, basis);
  }

  std::vector<SweepRow> rows(static_cast<std::size_t>(config.samples));
  parallel_for(rows.size(), resolve_threads(config.threads), [&](std::size_t s) {
    const double t = config.samples == 1 ? 0.0 : static_cast<double>(s) / static_cast<double>(config.samples - 1);
    const double eps = config.eps_min + (config.eps_max - config.eps_min) * t;
    Rng gen_rng = split_stream(config.seed, {kSweepGeneratorStream, s});
    const ComplexMatrix h_r = random_hermitian(config.qubits, gen_rng).matrix;
    SweepRow& row = rows[s];
    row.epsilon = eps;
    if (fresh_target) {
      Rng target_rng = split_stream(config.seed, {kSweepTargetStream, s});
      const ComplexMatrix u_t = expm_minus_i(random_hermitian(config.qubits, target_rng).matrix, 1.0);
      const Channel lam = unitary_channel(u_t);
      row.profile = fidelity_profile(lam, unitary_channel(perturbed_unitary(u_t, h_r, eps)), basis);
    } else {
      const Channel gam = unitary_channel(perturbed_unitary(*fixed->unitary, h_r, eps));
      row.profile = fidelity_profile(fixed->channel, fixed_images, gam, basis);
    }
  });
  return rows;
}

std::vector<ConfigKey> command_schema(std::string_view command) {
  std::vector<ConfigKey> keys = {{"seed", ValueKind::Unsigned, "0"}, {"threads", ValueKind::Integer, "0"}};
  if (command == "exact") {
    keys.push_back({"exact.qubits", ValueKind::Integer, "3"});
    keys.push_back({"exact.target", ValueKind::Text, "table4"});
    keys.push_back({"exact.compare", ValueKind::Text, "perturb:table5:eps=0.1"});
  } else if (command == "sweep") {
    keys.push_back({"sweep.qubits", ValueKind::Integer, "3"});
    keys.push_back({"sweep.samples", ValueKind::Integer, "100"});
    keys.push_back({"sweep.target", ValueKind::Text, "auto"});
    keys.push_back({"sweep.eps_min", ValueKind::Real, "0"});
    keys.push_back({"sweep.eps_max", ValueKind::Real, "1"});
  } else if (command == "benchmark") {
    const BenchmarkConfig bc;
    keys.push_back({"benchmark.qubits", ValueKind::Integer, "3"});
    keys.push_back({"benchmark.target", ValueKind::Text, "table6"});
    keys.push_back({"benchmark.compare", ValueKind::Text, "table7"});
    keys.push_back({"benchmark.reps", ValueKind::Integer, std::to_string(bc.reps)});
    keys.push_back({"benchmark.mode", ValueKind::Text, std::string(mode_name(bc.mode))});
    keys.push_back({"benchmark.schedule", ValueKind::Text, "bundled"});
    keys.push_back({"benchmark.max_unique_settings", ValueKind::Integer, std::to_string(bc.max_unique_settings)});
  } else if (command == "optimize") {
    const OptimizationConfig oc = OptimizationConfig::desk();
    keys.push_back({"optimize.iterations", ValueKind::Integer, std::to_string(oc.iterations)});
    keys.push_back({"optimize.initial_probes", ValueKind::Integer, std::to_string(oc.initial_probes)});
    keys.push_back({"optimize.estimator.l", ValueKind::Integer, std::to_string(oc.estimator_l)});
    keys.push_back({"optimize.estimator.m", ValueKind::Integer, std::to_string(oc.estimator_m)});
    keys.push_back({"optimize.estimator.mode", ValueKind::Text, std::string(mode_name(oc.mode))});
    keys.push_back({"optimize.bounds.lo", ValueKind::Real, format_real(-std::numbers::pi)});
    keys.push_back({"optimize.bounds.hi", ValueKind::Real, format_real(std::numbers::pi)});
    keys.push_back({"optimize.noise.depolarizing_1q", ValueKind::Real, format_real(oc.noise.depolarizing_1q)});
    keys.push_back({"optimize.noise.depolarizing_2q", ValueKind::Real, format_real(oc.noise.depolarizing_2q)});
    keys.push_back({"optimize.noise.coherent_zz_angle", ValueKind::Real, format_real(oc.noise.coherent_zz_angle)});
    keys.push_back({"optimize.resample_settings", ValueKind::Boolean, oc.resample_settings ? "true" : "false"});
    keys.push_back({"optimize.probe_zero", ValueKind::Boolean, oc.probe_zero ? "true" : "false"});
    keys.push_back({"optimize.acquisition.candidates", ValueKind::Integer, std::to_string(oc.acquisition.candidates)});
    keys.push_back({"optimize.acquisition.local_fraction", ValueKind::Real, format_real(oc.acquisition.local_fraction)});
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown command '" + std::string(command) + "'");
  }
  return keys;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fidelity hierarchy evaluation, estimation and gate optimization", "fidelity-forge"};
  app.require_subcommand(1);

  struct Common {
    std::string config_file;
    std::vector<std::string> assignments;
    std::string output;
  };
  Common common;
  std::vector<FlagBinding> bindings;
  bindings.reserve(32);
  auto bind = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    bindings.push_back({"", key, sub, nullptr});
    bindings.back().option = sub->add_option(flag, bindings.back().value, help);
  };
  auto add_common = [&](CLI::App* sub) {
    bind(sub, "--seed", "seed", "Root seed; every random stream derives from it");
    bind(sub, "--threads", "threads", "Worker threads (0: FIDELITY_FORGE_THREADS or 1)");
    sub->add_option("--config", common.config_file, "Nested key/value config file");
    sub->add_option("--set", common.assignments, "Override one key, e.g. --set sweep.samples=500");
    sub->add_option("--output,-o", common.output, "Write to this file instead of standard output");
  };

  CLI::App* exact = app.add_subcommand("exact", "Process fidelity, 0-fidelity and k-fidelities of a channel pair");
  add_common(exact);
  bind(exact, "--qubits", "exact.qubits", "Qubit count for seed sources");
  bind(exact, "--target", "exact.target", "Target channel source");
  bind(exact, "--compare", "exact.compare", "Comparison channel source");

  CLI::App* sweep = app.add_subcommand("sweep", "Fidelity hierarchy over rotated random pairs");
  add_common(sweep);
  bind(sweep, "--qubits", "sweep.qubits", "Qubit count (1..5)");
  bind(sweep, "--samples", "sweep.samples", "Number of pairs");
  bind(sweep, "--target", "sweep.target", "Target source, auto or random");
  bind(sweep, "--eps-min", "sweep.eps_min", "Smallest rotation strength");
  bind(sweep, "--eps-max", "sweep.eps_max", "Largest rotation strength");

  CLI::App* bench = app.add_subcommand("benchmark", "Estimator spread over a budget schedule");
  add_common(bench);
  bind(bench, "--qubits", "benchmark.qubits", "Qubit count for seed sources");
  bind(bench, "--target", "benchmark.target", "Target channel source");
  bind(bench, "--compare", "benchmark.compare", "Comparison channel source");
  bind(bench, "--reps", "benchmark.reps", "Estimates per schedule row and kind (>= 10)");
  bind(bench, "--mode", "benchmark.mode", "full_trace or projective");
  bind(bench, "--schedule", "benchmark.schedule", "Schedule file, or 'bundled'");

  CLI::App* opt = app.add_subcommand("optimize", "Bayesian optimization of the parameterised CNOT");
  add_common(opt);
  std::string preset;
  std::string noise;
  opt->add_option("--preset", preset, "desk (default) or paper")->check(CLI::IsMember({"desk", "paper"}));
  opt->add_option("--noise", noise, "default or none")->check(CLI::IsMember({"default", "none"}));
  bind(opt, "--iters", "optimize.iterations", "Objective evaluations");
  bind(opt, "--probes", "optimize.initial_probes", "Initial probes before the surrogate takes over");
  bind(opt, "--settings", "optimize.estimator.l", "Settings per estimate");
  bind(opt, "--shots", "optimize.estimator.m", "Shots per setting (projective)");
  bind(opt, "--mode", "optimize.estimator.mode", "full_trace or projective");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    RunConfig cfg(command_schema(command));
    if (command == "optimize" && preset == "paper") cfg.merge(bundled_fixture("paper.cfg"), "preset paper");
    if (!common.config_file.empty()) cfg.merge(read_text_file(common.config_file), common.config_file);
    for (const std::string& assignment : common.assignments) {
      const auto eq = assignment.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::InvalidConfig, "--set expects key=value, got '" + assignment + "'");
      cfg.set(assignment.substr(0, eq), assignment.substr(eq + 1));
    }
    if (noise == "none") set_noise(cfg, NoiseConfig::none());
    if (noise == "default") set_noise(cfg, NoiseConfig::defaults());
    for (const FlagBinding& b : bindings) {
      if (b.owner == sub && b.option->count() > 0) cfg.set(b.key, b.value);
    }
    const long long requested = cfg.integer("threads");
    if (requested < 0) throw Error(ErrorCode::InvalidConfig, "threads must be >= 0");
    cfg.set("threads", std::to_string(resolve_threads(static_cast<int>(requested))));

    bool sanity_failed = false;
    std::string body;
    if (command == "exact") body = run_exact(cfg);
    if (command == "sweep") body = run_sweep(cfg);
    if (command == "benchmark") body = run_benchmark(cfg, sanity_failed);
    if (command == "optimize") body = trace_csv(run_optimization(optimization_from(cfg)));

    const std::string text = "# command = " + command + "\n" + cfg.echo() + body;
    if (common.output.empty()) {
      out << text;
    } else {
      std::ofstream file(common.output, std::ios::binary | std::ios::trunc);
      if (!(file << text)) throw Error(ErrorCode::InvalidConfig, "cannot write '" + common.output + "'");
    }
    if (sanity_failed) {
      err << "benchmark: at least one row's empirical std left its sanity band\n";
      return kExitSanity;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace ff
