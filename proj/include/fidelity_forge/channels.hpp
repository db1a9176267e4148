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

#include <span>
#include <variant>
#include <vector>

#include "fidelity_forge/fixtures.hpp"
#include "fidelity_forge/linalg.hpp"
#include "fidelity_forge/rng.hpp"

namespace ff {

/// Completely-positive trace-preserving map in Kraus form.
class Channel {
 public:
  /// Validates shapes and trace preservation (sum K^dagger K = I within 1e-9).
  static Channel from_kraus(std::vector<ComplexMatrix> kraus);

  Eigen::Index dim() const noexcept { return dim_; }
  const std::vector<ComplexMatrix>& kraus() const noexcept { return kraus_; }
  bool is_unitary() const noexcept { return kraus_.size() == 1; }

  /// sum_k K_k x K_k^dagger. Accepts any dim x dim operator, not only states.
  ComplexMatrix operator()(const ComplexMatrix& x) const;

 private:
  Channel(Eigen::Index dim, std::vector<ComplexMatrix> kraus) : dim_(dim), kraus_(std::move(kraus)) {}

  Eigen::Index dim_ = 0;
  std::vector<ComplexMatrix> kraus_;
};

Channel unitary_channel(const ComplexMatrix& u);
Channel identity_channel(Eigen::Index dim);
DensityMatrix apply(const Channel& ch, const DensityMatrix& rho);

/// Kraus list {K_o K_i}. Lists longer than dim^2 are re-expressed through the
/// Choi matrix's eigendecomposition, which keeps at most dim^2 operators.
Channel compose(const Channel& outer, const Channel& inner);
Channel tensor(const Channel& a, const Channel& b);

/// Minimal Kraus form obtained from the Choi matrix.
Channel canonical_kraus(const Channel& ch);

/// rho -> (1-p) rho + p/4^n sum_P P rho P over the n-qubit Pauli group; p=1
/// gives the maximally mixed state.
Channel depolarizing(int n_qubits, double p);

/// Column-stacking superoperator S with vec(ch(x)) = S vec(x).
ComplexMatrix superoperator(const Channel& ch);

// Circuits. Qubit 0 is the least significant bit of the computational-basis
// index (rightmost Kronecker factor).

struct U3Gate {
  int target = 0;
  double theta = 0.0;
  double phi = 0.0;
  double lambda = 0.0;
};

struct CnotGate {
  int control = 0;
  int target = 1;
};

using Gate = std::variant<U3Gate, CnotGate>;

struct CircuitSpec {
  int n_qubits = 0;
  std::vector<Gate> gates;

  /// Throws InvalidQubitIndex on out-of-range qubits or control == target.
  void validate() const;
  std::vector<double> u3_parameters() const;
  std::size_t u3_count() const;
};

ComplexMatrix u3_matrix(double theta, double phi, double lambda);
ComplexMatrix embed_single_qubit(int n_qubits, int qubit, const ComplexMatrix& u);
ComplexMatrix cnot_matrix(int n_qubits, int control, int target);
ComplexMatrix gate_unitary(int n_qubits, const Gate& gate);
ComplexMatrix circuit_unitary(const CircuitSpec& spec);

inline constexpr std::size_t kParameterisedCnotParams = 18;
inline constexpr std::size_t kRandomCircuitParams = 30;

/// Three-qubit CNOT(0 -> 2) routed through qubit 1: a U3 layer, CNOT(0,1),
/// CNOT(1,2), CNOT(0,1), CNOT(1,2), another U3 layer. Zero parameters give
/// the ideal gate.
CircuitSpec parameterised_cnot_spec(std::span<const double> params);

/// Ideal three-qubit CNOT with control 0 and target 2.
ComplexMatrix ideal_cnot_02();

/// Fixed ten-U3 random-circuit layout filled with 30 parameters:
/// U3 layer, CNOT(0,1), CNOT(1,2), U3 layer, CNOT(0,1), CNOT(1,2), U3 layer, U3 q0.
CircuitSpec random_circuit_layout(std::span<const double> params);
CircuitSpec random_circuit_spec(Rng& rng);
/// Adds independent uniform offsets in [-spread, spread] to every U3 parameter.
CircuitSpec perturbed_circuit_spec(const CircuitSpec& spec, double spread, Rng& rng);
CircuitSpec circuit_from_table(std::string_view table_name);

/// Circuit text format: "qubits <n>", "u3 <q> <theta> <phi> <lambda>",
/// "cx <control> <target>", '#' comments.
CircuitSpec parse_circuit(std::string_view text);

ComplexMatrix hermitian_from_coeffs(const RandomHermitianCoeffs& coeffs);
struct RandomHermitian {
  RandomHermitianCoeffs coeffs;
  ComplexMatrix matrix;
};
RandomHermitian random_hermitian(int n_qubits, Rng& rng);

/// exp(-i eps H_r) U_t exp(i eps H_r).
ComplexMatrix perturbed_unitary(const ComplexMatrix& u_t, const ComplexMatrix& h_r, double eps);

struct NoiseConfig {
  double depolarizing_1q = 0.0;
  double depolarizing_2q = 0.0;
  double coherent_zz_angle = 0.0;

  void validate() const;
  static NoiseConfig none() { return {}; }
  static NoiseConfig defaults();
};

/// Gate-by-gate noisy simulation: every U3 is followed by single-qubit
/// depolarizing on its target; every CNOT by two-qubit depolarizing on its
/// pair and a coherent exp(-i angle Z(x)Z) over-rotation.
Channel noisy_backend(const CircuitSpec& spec, const NoiseConfig& noise);

/// ch composed with itself `times` times.
Channel repeat(const Channel& ch, int times);

}  // namespace ff
