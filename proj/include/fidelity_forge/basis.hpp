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

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fidelity_forge/linalg.hpp"

namespace ff {

inline constexpr int kMaxQubits = 6;

/// Base-4 digit vector, most significant digit first. Digit k of the label
/// belongs to the k-th tensor factor (leftmost in the Kronecker product).
using DigitLabel = std::vector<int>;

DigitLabel index_to_digits(std::size_t index, int n_qubits);
std::size_t digits_to_index(std::span<const int> digits);

/// Number of positions at which the base-4 expansions of a and b differ.
int hamming_distance(std::size_t a, std::size_t b, int n_qubits);

/// Single-qubit Bloch vectors of the canonical SIC tetrahedron.
std::array<std::array<double, 3>, 4> sic_bloch_vectors();

/// |psi><psi| for a state with the given Bloch vector, (I + r.sigma)/2.
DensityMatrix bloch_state(const std::array<double, 3>& r);

struct SicSet {
  int n_qubits = 0;
  std::vector<DensityMatrix> states;  // 4^n, base-4 lexicographic order
  std::vector<DigitLabel> labels;
};

struct PauliBasis {
  int n_qubits = 0;
  std::vector<Observable> observables;  // (tensor of I,X,Y,Z) / sqrt(d)
  std::vector<DigitLabel> labels;       // digits 0..3 = I,X,Y,Z
};

struct OverlapStructure {
  RealMatrix overlaps;              // B_ij = tr[rho_i rho_j]
  RealMatrix inverse;               // Kronecker power of single_qubit_inverse
  RealMatrix single_qubit_inverse;  // 4x4
};

/// Product eigenbasis of a normalized Pauli string: columns are product
/// eigenvectors, values are the matching eigenvalues (+-1/sqrt(d)).
struct PauliEigenbasis {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
};

std::array<DensityMatrix, 4> sic_single_qubit();
SicSet sic_product_states(int n_qubits);
PauliBasis pauli_basis(int n_qubits);
OverlapStructure overlap_structure(const SicSet& states);

/// Unnormalized single-qubit Pauli: 0=I, 1=X, 2=Y, 3=Z.
ComplexMatrix pauli_matrix(int digit);

/// Tensor product of unnormalized Paulis for the given label.
ComplexMatrix pauli_string(std::span<const int> label);

PauliEigenbasis pauli_eigenbasis(std::span<const int> label);

/// Entry of the inverse overlap matrix for a pair at Hamming distance m:
/// (-1)^m 5^(n-m) / 4^n.
double order_coefficient(int n_qubits, int m);

/// Sum over ordered pairs i != j of tr[rho_i rho_j].
double overlap_cost(std::span<const DensityMatrix> states);

/// Everything the fidelity hierarchy needs for one qubit count, built once.
struct HierarchyBasis {
  int n_qubits = 0;
  int dim = 0;
  SicSet sic;
  PauliBasis pauli;
  OverlapStructure overlap;
  std::vector<std::uint8_t> hamming;  // row-major d^2 x d^2 table of Hamming distances

  int hamming_at(std::size_t i, std::size_t j) const { return hamming[i * sic.states.size() + j]; }
};

/// Cached, thread-safe accessor. The returned reference lives for the
/// program's lifetime.
const HierarchyBasis& hierarchy_basis(int n_qubits);

/// Number of qubits for a power-of-two dimension; throws DimensionMismatch otherwise.
int qubits_for_dimension(Eigen::Index dim);

}  // namespace ff
