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

#include "fidelity_forge/basis.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <string>

#include "fidelity_forge/errors.hpp"

namespace ff {

namespace {

void require_qubits(int n) {
  if (n < 1 || n > kMaxQubits) {
    throw Error(ErrorCode::TooManyQubits, "qubit count must be in [1, 6], got " + std::to_string(n));
  }
}

std::size_t pow4(int n) { return std::size_t{1} << (2 * n); }

}  // namespace

DigitLabel index_to_digits(std::size_t index, int n_qubits) {
  DigitLabel digits(static_cast<std::size_t>(n_qubits));
  for (int k = n_qubits - 1; k >= 0; --k) {
    digits[static_cast<std::size_t>(k)] = static_cast<int>(index & 3U);
    index >>= 2;
  }
  return digits;
}

std::size_t digits_to_index(std::span<const int> digits) {
  std::size_t index = 0;
  for (int d : digits) index = (index << 2) | static_cast<std::size_t>(d);
  return index;
}

int hamming_distance(std::size_t a, std::size_t b, int n_qubits) {
  int count = 0;
  for (int k = 0; k < n_qubits; ++k) {
    if (((a >> (2 * k)) & 3U) != ((b >> (2 * k)) & 3U)) ++count;
  }
  return count;
}

std::array<std::array<double, 3>, 4> sic_bloch_vectors() {
  const double s2 = std::sqrt(2.0);
  return {{{0.0, 0.0, 1.0},
           {2.0 * s2 / 3.0, 0.0, -1.0 / 3.0},
           {-s2 / 3.0, std::sqrt(2.0 / 3.0), -1.0 / 3.0},
           {-s2 / 3.0, -std::sqrt(2.0 / 3.0), -1.0 / 3.0}}};
}

ComplexMatrix pauli_matrix(int digit) {
  ComplexMatrix m(2, 2);
  switch (digit) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: throw Error(ErrorCode::OutOfRange, "Pauli digit must be 0..3");
  }
  return m;
}

DensityMatrix bloch_state(const std::array<double, 3>& r) {
  return 0.5 * (pauli_matrix(0) + r[0] * pauli_matrix(1) + r[1] * pauli_matrix(2) + r[2] * pauli_matrix(3));
}

std::array<DensityMatrix, 4> sic_single_qubit() {
  const auto bloch = sic_bloch_vectors();
  return {bloch_state(bloch[0]), bloch_state(bloch[1]), bloch_state(bloch[2]), bloch_state(bloch[3])};
}

SicSet sic_product_states(int n_qubits) {
  require_qubits(n_qubits);
  const auto single = sic_single_qubit();
  SicSet set;
  set.n_qubits = n_qubits;
  const std::size_t count = pow4(n_qubits);
  set.states.reserve(count);
  set.labels.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    DigitLabel label = index_to_digits(i, n_qubits);
    ComplexMatrix state = single[static_cast<std::size_t>(label[0])];
    for (std::size_t k = 1; k < label.size(); ++k) state = kron(state, single[static_cast<std::size_t>(label[k])]);
    set.states.push_back(std::move(state));
    set.labels.push_back(std::move(label));
  }
  return set;
}

ComplexMatrix pauli_string(std::span<const int> label) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int digit : label) out = kron(out, pauli_matrix(digit));
  return out;
}

PauliBasis pauli_basis(int n_qubits) {
  require_qubits(n_qubits);
  PauliBasis basis;
  basis.n_qubits = n_qubits;
  const std::size_t count = pow4(n_qubits);
  const double norm = 1.0 / std::sqrt(static_cast<double>(std::size_t{1} << n_qubits));
  basis.observables.reserve(count);
  basis.labels.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    DigitLabel label = index_to_digits(i, n_qubits);
    basis.observables.push_back(norm * pauli_string(label));
    basis.labels.push_back(std::move(label));
  }
  return basis;
}

PauliEigenbasis pauli_eigenbasis(std::span<const int> label) {
  // Single-qubit eigenvectors ordered (-1, +1).
  const double h = 1.0 / std::sqrt(2.0);
  auto single = [h](int digit) {
    ComplexMatrix v(2, 2);
    RealVector e(2);
    e << -1.0, 1.0;
    switch (digit) {
      case 0: v << 1, 0, 0, 1; e << 1.0, 1.0; break;
      case 1: v << h, h, -h, h; break;
      case 2: v << h, h, Complex(0, -h), Complex(0, h); break;
      case 3: v << 0, 1, 1, 0; break;
      default: throw Error(ErrorCode::OutOfRange, "Pauli digit must be 0..3");
    }
    return std::pair{v, e};
  };
  ComplexMatrix vectors = ComplexMatrix::Identity(1, 1);
  RealMatrix values = RealMatrix::Ones(1, 1);
  for (int digit : label) {
    auto [v, e] = single(digit);
    vectors = kron(vectors, v);
    values = kron(values, RealMatrix(e));
  }
  const double norm = 1.0 / std::sqrt(static_cast<double>(vectors.rows()));
  return {RealVector(values.col(0) * norm), std::move(vectors)};
}

OverlapStructure overlap_structure(const SicSet& states) {
  const auto count = static_cast<Eigen::Index>(states.states.size());
  if (count == 0) throw Error(ErrorCode::DimensionMismatch, "empty state set");
  const Eigen::Index dim = states.states.front().rows();
  ComplexMatrix stacked(dim * dim, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto& s = states.states[static_cast<std::size_t>(i)];
    if (s.rows() != dim || s.cols() != dim) throw Error(ErrorCode::DimensionMismatch, "states differ in dimension");
    stacked.col(i) = Eigen::Map<const ComplexVector>(s.data(), s.size());
  }
  OverlapStructure out;
  // B_ij = tr[rho_i^dagger rho_j], evaluated for all pairs at once.
  out.overlaps = (stacked.adjoint() * stacked).real();

  // Route (b): invert the single-qubit block and take its Kronecker power.
  const auto single = sic_single_qubit();
  RealMatrix b1(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) b1(i, j) = frob_inner(single[static_cast<std::size_t>(i)], single[static_cast<std::size_t>(j)]).real();
  }
  out.single_qubit_inverse = b1.fullPivLu().inverse();
  if ((b1 * out.single_qubit_inverse - RealMatrix::Identity(4, 4)).norm() > 1e-6) {
    throw Error(ErrorCode::SingularOverlap, "single-qubit overlap matrix is singular");
  }
  RealMatrix power = RealMatrix::Ones(1, 1);
  for (int k = 0; k < states.n_qubits; ++k) power = kron(power, out.single_qubit_inverse);
  if (power.rows() != count) {
    throw Error(ErrorCode::DimensionMismatch, "state count does not match 4^n");
  }

  // Route (a): direct numeric inversion, cross-checked against (b).
  Eigen::FullPivLU<RealMatrix> lu(out.overlaps);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularOverlap, "overlap matrix is singular");
  const RealMatrix direct = lu.inverse();
  const double residual = (out.overlaps * direct - RealMatrix::Identity(count, count)).norm();
  if (residual > 1e-6) {
    throw Error(ErrorCode::SingularOverlap, "inversion residual " + std::to_string(residual));
  }
  const double disagreement = (direct - power).cwiseAbs().maxCoeff();
  if (disagreement > 1e-8) {
    throw Error(ErrorCode::SingularOverlap,
                "direct and Kronecker inverses disagree by " + std::to_string(disagreement) +
                    "; states are not a product SIC set");
  }
  out.inverse = std::move(power);
  return out;
}

double order_coefficient(int n_qubits, int m) {
  if (n_qubits < 0 || m < 0 || m > n_qubits) {
    throw Error(ErrorCode::OutOfRange, "order coefficient needs 0 <= m <= n");
  }
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  return sign * std::pow(5.0, n_qubits - m) / std::pow(4.0, n_qubits);
}

double overlap_cost(std::span<const DensityMatrix> states) {
  double total = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = 0; j < states.size(); ++j) {
      if (i == j) continue;
      if (states[i].rows() != states[j].rows() || states[i].cols() != states[j].cols()) {
        throw Error(ErrorCode::DimensionMismatch, "overlap_cost states differ in dimension");
      }
      // tr[rho_i rho_j] for Hermitian rho_i.
      const Complex v = frob_inner(states[i], states[j]);
      if (std::abs(v.imag()) > 1e-10) {
        throw Error(ErrorCode::NotHermitian, "overlap with imaginary part " + std::to_string(v.imag()));
      }
      total += v.real();
    }
  }
  return total;
}

int qubits_for_dimension(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim || n < 1) {
    throw Error(ErrorCode::DimensionMismatch, "dimension " + std::to_string(dim) + " is not 2^n with n >= 1");
  }
  return n;
}

const HierarchyBasis& hierarchy_basis(int n_qubits) {
  require_qubits(n_qubits);
  static std::array<std::unique_ptr<HierarchyBasis>, kMaxQubits + 1> cache;
  static std::array<std::once_flag, kMaxQubits + 1> flags;
  const auto slot = static_cast<std::size_t>(n_qubits);
  std::call_once(flags[slot], [&] {
    auto basis = std::make_unique<HierarchyBasis>();
    basis->n_qubits = n_qubits;
    basis->dim = 1 << n_qubits;
    basis->sic = sic_product_states(n_qubits);
    basis->pauli = pauli_basis(n_qubits);
    basis->overlap = overlap_structure(basis->sic);
    const std::size_t count = basis->sic.states.size();
    basis->hamming.resize(count * count);
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < count; ++j) {
        basis->hamming[i * count + j] = static_cast<std::uint8_t>(hamming_distance(i, j, n_qubits));
      }
    }
    cache[slot] = std::move(basis);
  });
  return *cache[slot];
}

}  // namespace ff
