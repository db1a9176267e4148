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

#include "fidelity_forge/fidelity.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fidelity_forge/errors.hpp"

namespace ff {

namespace {

void require_pair(const Channel& lam, const Channel& gam) {
  if (lam.dim() != gam.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "channels act on dimensions " + std::to_string(lam.dim()) + " and " +
                                                  std::to_string(gam.dim()));
  }
}

void require_basis(const Channel& ch, const HierarchyBasis& basis) {
  if (ch.dim() != basis.dim) {
    throw Error(ErrorCode::DimensionMismatch, "basis for dimension " + std::to_string(basis.dim) +
                                                  " used with channel of dimension " + std::to_string(ch.dim()));
  }
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

/// Sum over all pairs of coefficient(hamming(i, j)) * gram(i, j).
double hamming_weighted_sum(const ComplexMatrix& gram, const HierarchyBasis& basis, std::span<const double> by_distance) {
  const auto count = gram.rows();
  std::vector<double> rows(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    std::vector<double> terms(static_cast<std::size_t>(count));
    for (Eigen::Index j = 0; j < count; ++j) {
      const double c = by_distance[basis.hamming_at(static_cast<std::size_t>(i), static_cast<std::size_t>(j))];
      terms[static_cast<std::size_t>(j)] = c == 0.0 ? 0.0 : c * gram(i, j).real();
    }
    rows[static_cast<std::size_t>(i)] = pairwise_sum(terms);
  }
  return pairwise_sum(rows);
}

double real_part_checked(Complex v, double scale, const char* what) {
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, scale)) {
    throw std::logic_error(std::string(what) + " has imaginary residual " + std::to_string(v.imag()));
  }
  return v.real();
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

ComplexMatrix sic_images(const Channel& ch, const HierarchyBasis& basis) {
  require_basis(ch, basis);
  const auto count = static_cast<Eigen::Index>(basis.sic.states.size());
  ComplexMatrix images(basis.dim * basis.dim, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const ComplexMatrix out = ch(basis.sic.states[static_cast<std::size_t>(i)]);
    images.col(i) = Eigen::Map<const ComplexVector>(out.data(), out.size());
  }
  return images;
}

double process_fidelity_exact(const Channel& lam, const Channel& gam) {
  require_pair(lam, gam);
  const HierarchyBasis& basis = hierarchy_basis(qubits_for_dimension(lam.dim()));
  const auto& paulis = basis.pauli.observables;
  std::vector<double> re(paulis.size());
  std::vector<double> im(paulis.size());
  for (std::size_t i = 0; i < paulis.size(); ++i) {
    // Normalized Paulis are Hermitian, and lam(sigma)^dagger = lam(sigma^dagger).
    const Complex term = frob_inner(lam(paulis[i]), gam(paulis[i]));
    re[i] = term.real();
    im[i] = term.imag();
  }
  const double d2 = static_cast<double>(basis.dim * basis.dim);
  return real_part_checked({pairwise_sum(re) / d2, pairwise_sum(im) / d2}, 1.0, "operator-basis fidelity");
}

double process_fidelity_statebasis(const Channel& lam, const Channel& gam, const HierarchyBasis& basis) {
  require_pair(lam, gam);
  require_basis(lam, basis);
  const ComplexMatrix gram = sic_images(lam, basis).adjoint() * sic_images(gam, basis);
  const auto& inv = basis.overlap.inverse;
  const auto count = gram.rows();
  std::vector<double> rows(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    std::vector<double> terms(static_cast<std::size_t>(count));
    for (Eigen::Index j = 0; j < count; ++j) terms[static_cast<std::size_t>(j)] = inv(i, j) * gram(i, j).real();
    rows[static_cast<std::size_t>(i)] = pairwise_sum(terms);
  }
  return pairwise_sum(rows) / static_cast<double>(basis.dim * basis.dim);
}

double process_fidelity_local_observables(const Channel& lam, const Channel& gam, const HierarchyBasis& basis) {
  require_pair(lam, gam);
  require_basis(lam, basis);
  const auto count = static_cast<Eigen::Index>(basis.sic.states.size());
  // expect(l, j) = tr[ch(rho_l) W_j], computed trace by trace.
  auto expectations = [&](const Channel& ch) {
    RealMatrix t(count, count);
    for (Eigen::Index l = 0; l < count; ++l) {
      const ComplexMatrix out = ch(basis.sic.states[static_cast<std::size_t>(l)]);
      for (Eigen::Index j = 0; j < count; ++j) {
        t(l, j) = frob_inner(basis.pauli.observables[static_cast<std::size_t>(j)], out).real();
      }
    }
    return t;
  };
  const RealMatrix lam_t = expectations(lam);
  const RealMatrix gam_t = expectations(gam);
  const RealMatrix c = basis.overlap.inverse.transpose() * lam_t;  // C_ij = sum_l [B^-1]_li lam_t(l, j)
  std::vector<double> rows(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    std::vector<double> terms(static_cast<std::size_t>(count));
    for (Eigen::Index j = 0; j < count; ++j) terms[static_cast<std::size_t>(j)] = c(i, j) * gam_t(i, j);
    rows[static_cast<std::size_t>(i)] = pairwise_sum(terms);
  }
  return pairwise_sum(rows) / static_cast<double>(basis.dim * basis.dim);
}

FidelityReport evaluate_fidelity(const Channel& lam, const Channel& gam, Formulation formulation) {
  require_pair(lam, gam);
  const HierarchyBasis& basis = hierarchy_basis(qubits_for_dimension(lam.dim()));
  const std::size_t d2 = basis.sic.states.size();
  switch (formulation) {
    case Formulation::OperatorBasis:
      return {process_fidelity_exact(lam, gam), formulation, d2};
    case Formulation::StateBasis:
      return {process_fidelity_statebasis(lam, gam, basis), formulation, d2 * d2};
    case Formulation::LocalObservable:
      return {process_fidelity_local_observables(lam, gam, basis), formulation, 2 * d2 * d2};
  }
  throw Error(ErrorCode::OutOfRange, "unknown formulation");
}

double hierarchy_coefficient(int n_qubits, int k, int m) {
  if (k < 0 || k > n_qubits || m < 0 || m > n_qubits) {
    throw Error(ErrorCode::OutOfRange, "hierarchy coefficient needs 0 <= k, m <= n");
  }
  if (m > k) return 0.0;
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  double total = 0.0;
  for (int j = m; j <= k; ++j) total += std::pow(0.25, j) * binomial(n_qubits - m, j - m);
  return sign * total;
}

double k_fidelity(const Channel& lam, const Channel& gam, int k, const HierarchyBasis& basis) {
  require_pair(lam, gam);
  require_basis(lam, basis);
  if (k < 0 || k > basis.n_qubits) {
    throw Error(ErrorCode::OutOfRange, "order k must be in [0, " + std::to_string(basis.n_qubits) + "]");
  }
  const ComplexMatrix gram = sic_images(lam, basis).adjoint() * sic_images(gam, basis);
  std::vector<double> coeff(static_cast<std::size_t>(basis.n_qubits + 1));
  for (int m = 0; m <= basis.n_qubits; ++m) coeff[static_cast<std::size_t>(m)] = hierarchy_coefficient(basis.n_qubits, k, m);
  return hamming_weighted_sum(gram, basis, coeff) / static_cast<double>(basis.dim * basis.dim);
}

double hamming_truncated_fidelity(const Channel& lam, const Channel& gam, int k, const HierarchyBasis& basis) {
  require_pair(lam, gam);
  require_basis(lam, basis);
  if (k < 0 || k > basis.n_qubits) {
    throw Error(ErrorCode::OutOfRange, "order k must be in [0, " + std::to_string(basis.n_qubits) + "]");
  }
  const ComplexMatrix gram = sic_images(lam, basis).adjoint() * sic_images(gam, basis);
  std::vector<double> coeff(static_cast<std::size_t>(basis.n_qubits + 1), 0.0);
  for (int m = 0; m <= k; ++m) coeff[static_cast<std::size_t>(m)] = order_coefficient(basis.n_qubits, m);
  return hamming_weighted_sum(gram, basis, coeff) / static_cast<double>(basis.dim * basis.dim);
}

double zero_fidelity(const Channel& lam, const Channel& gam, const HierarchyBasis& basis) {
  require_pair(lam, gam);
  require_basis(lam, basis);
  const ComplexMatrix lam_images = sic_images(lam, basis);
  const ComplexMatrix gam_images = sic_images(gam, basis);
  const auto count = lam_images.cols();
  std::vector<double> terms(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    terms[static_cast<std::size_t>(i)] = lam_images.col(i).dot(gam_images.col(i)).real();
  }
  const double d2 = static_cast<double>(basis.dim * basis.dim);
  const double f0 = pairwise_sum(terms) / d2;

  if (basis.n_qubits <= 4) {
    ComplexMatrix observables(basis.dim * basis.dim, count);
    for (Eigen::Index j = 0; j < count; ++j) {
      const auto& w = basis.pauli.observables[static_cast<std::size_t>(j)];
      observables.col(j) = Eigen::Map<const ComplexVector>(w.data(), w.size());
    }
    const RealMatrix lam_t = (lam_images.adjoint() * observables).real();
    const RealMatrix gam_t = (gam_images.adjoint() * observables).real();
    const double via_observables = lam_t.cwiseProduct(gam_t).sum() / d2;
    if (std::abs(via_observables - f0) > 1e-10) {
      throw std::logic_error("0-fidelity state and observable forms disagree by " +
                             std::to_string(std::abs(via_observables - f0)));
    }
  }
  return f0;
}

FidelityProfile fidelity_profile(const Channel& lam, const Channel& gam, const HierarchyBasis& basis) {
  return fidelity_profile(lam, sic_images(lam, basis), gam, basis);
}

FidelityProfile fidelity_profile(const Channel& lam, const ComplexMatrix& lam_images, const Channel& gam,
                                 const HierarchyBasis& basis) {
  require_pair(lam, gam);
  require_basis(lam, basis);
  const ComplexMatrix gram = lam_images.adjoint() * sic_images(gam, basis);
  const double d2 = static_cast<double>(basis.dim * basis.dim);
  FidelityProfile out;
  out.process = process_fidelity_exact(lam, gam);
  for (int k = 0; k <= basis.n_qubits; ++k) {
    std::vector<double> coeff(static_cast<std::size_t>(basis.n_qubits + 1));
    for (int m = 0; m <= basis.n_qubits; ++m) coeff[static_cast<std::size_t>(m)] = hierarchy_coefficient(basis.n_qubits, k, m);
    out.k_fidelities.push_back(hamming_weighted_sum(gram, basis, coeff) / d2);
  }
  std::vector<double> diag(static_cast<std::size_t>(gram.rows()));
  for (Eigen::Index i = 0; i < gram.rows(); ++i) diag[static_cast<std::size_t>(i)] = gram(i, i).real();
  out.zero = pairwise_sum(diag) / d2;
  return out;
}

}  // namespace ff
