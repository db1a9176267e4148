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
#include <vector>

#include "fidelity_forge/basis.hpp"
#include "fidelity_forge/channels.hpp"

namespace ff {

// Fidelity functionals between a target channel `lam` and an implemented
// channel `gam`. None of them clamp: low-order k-fidelities can be negative.

enum class Formulation {
  OperatorBasis,    // (1/d^2) sum_i tr[lam(sigma_i^dagger) gam(sigma_i)], normalized Paulis
  StateBasis,       // (1/d^2) sum_ij [B^-1]_ij tr[lam(rho_i) gam(rho_j)], product SIC states
  LocalObservable,  // (1/d^2) sum_ij C_ij tr[gam(rho_i) W_j]; O(d^4) traces, verification only
};

struct FidelityReport {
  double value = 0.0;
  Formulation formulation = Formulation::OperatorBasis;
  std::size_t n_terms = 0;  // trace evaluations summed
};

/// Process fidelity from the orthonormal Pauli operator basis.
double process_fidelity_exact(const Channel& lam, const Channel& gam);

double process_fidelity_statebasis(const Channel& lam, const Channel& gam, const HierarchyBasis& basis);

/// Local-observable form with C_ij = sum_l [B^-1]_li tr[lam(rho_l) W_j].
double process_fidelity_local_observables(const Channel& lam, const Channel& gam, const HierarchyBasis& basis);

FidelityReport evaluate_fidelity(const Channel& lam, const Channel& gam, Formulation formulation);

/// Coefficient multiplying tr[lam(rho_i) gam(rho_j)] in the order-k
/// fidelity for a pair of inputs differing on m qubits. The inverse overlap
/// matrix factorizes as (1 - A)^(x)n with A = 1 - [B1]^-1; keeping terms with
/// at most k factors of A gives
///   sum_{j=m}^{k} (-1)^m (1/4)^j binom(n-m, j-m)   for m <= k, else 0.
/// At k = n this is the full inverse-overlap entry (-1)^m 5^(n-m) / 4^n; at
/// k = 0 it is the unit diagonal of the 0-fidelity.
double hierarchy_coefficient(int n_qubits, int k, int m);

/// Order-k member of the fidelity hierarchy. k = 0 is the 0-fidelity, k = n
/// is the process fidelity.
double k_fidelity(const Channel& lam, const Channel& gam, int k, const HierarchyBasis& basis);

/// Alternative truncation: full inverse-overlap entries for pairs at Hamming
/// distance <= k and nothing beyond. Agrees with k_fidelity at k = n; at
/// k = 0 it is (5/4)^n times the 0-fidelity.
double hamming_truncated_fidelity(const Channel& lam, const Channel& gam, int k, const HierarchyBasis& basis);

/// (1/d^2) sum_i tr[lam(rho_i) gam(rho_i)] over the product SIC inputs. For
/// n <= 4 the observable double sum (1/d^2) sum_ij tr[lam(rho_i) W_j]
/// tr[gam(rho_i) W_j] is evaluated as well and must agree within 1e-10.
double zero_fidelity(const Channel& lam, const Channel& gam, const HierarchyBasis& basis);

/// Column i holds vec(ch(rho_i)) for every product SIC input.
ComplexMatrix sic_images(const Channel& ch, const HierarchyBasis& basis);

struct FidelityProfile {
  double process = 0.0;
  double zero = 0.0;
  std::vector<double> k_fidelities;  // index k = 0..n
};

/// All hierarchy members from one Gram matrix of SIC images. `process` comes
/// from the operator-basis formulation, independently of the hierarchy.
FidelityProfile fidelity_profile(const Channel& lam, const Channel& gam, const HierarchyBasis& basis);
FidelityProfile fidelity_profile(const Channel& lam, const ComplexMatrix& lam_images, const Channel& gam,
                                 const HierarchyBasis& basis);

/// Deterministic pairwise (tree) summation.
double pairwise_sum(std::span<const double> values);

}  // namespace ff
