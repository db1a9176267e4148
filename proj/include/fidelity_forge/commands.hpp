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
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fidelity_forge/channels.hpp"
#include "fidelity_forge/config.hpp"
#include "fidelity_forge/fidelity.hpp"

namespace ff {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSanity = 3;

struct ChannelSource {
  Channel channel;
  std::optional<ComplexMatrix> unitary;  // set for unitary sources
};

/// Channel-source language:
///   table<N>                N = 1..5: exp(-i H_N) from the coefficient table;
///                           N = 6, 7: the U3 circuit table on the fixed layout
///   seed:<k>                exp(-i H) for H drawn from seed k on `n_qubits`
///   perturb:<src>:eps=<x>   exp(-i x H_src) U exp(i x H_src), U = `base`
///   circuit:<file>          circuit text file, noiseless
/// `base` is required by perturb and is ignored otherwise.
ChannelSource resolve_channel_source(std::string_view source, int n_qubits, const ComplexMatrix* base = nullptr);

/// Hermitian generator named by a table<1..5> or seed:<k> source.
ComplexMatrix hermitian_from_source(std::string_view source, int n_qubits);

struct SweepConfig {
  int qubits = 3;
  int samples = 100;
  /// A channel source, "auto" (table2 for 2 qubits, table3 for 3, random
  /// otherwise) or "random" (a fresh target per sample).
  std::string target = "auto";
  double eps_min = 0.0;
  double eps_max = 1.0;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct SweepRow {
  double epsilon = 0.0;
  FidelityProfile profile;
};

/// Sample s pairs the target with its rotation by a random Hermitian drawn
/// from (seed, s), at eps on the uniform grid from eps_min to eps_max.
std::vector<SweepRow> fidelity_sweep(const SweepConfig& config);

/// Schema of every key the given subcommand accepts, with defaults.
std::vector<ConfigKey> command_schema(std::string_view command);

/// Parses argv (argv[0] is the program name), runs the subcommand and writes
/// the resolved config echo plus CSV to `out`. Returns 0, 2 on configuration
/// errors (message on `err`) or 3 when a benchmark row leaves its sanity band.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ff
