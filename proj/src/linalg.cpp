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

#include "fidelity_forge/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "fidelity_forge/errors.hpp"

namespace ff {

namespace {

template <typename Matrix>
Matrix kron_impl(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " requires a square matrix, got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  }
}

}  // namespace

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) { return kron_impl(a, b); }

RealMatrix kron(const RealMatrix& a, const RealMatrix& b) { return kron_impl(a, b); }

double tolerance_scale(const ComplexMatrix& m) { return std::max(1.0, m.norm()); }

bool is_hermitian(const ComplexMatrix& h, double tol) {
  if (h.rows() != h.cols()) return false;
  return (h - h.adjoint()).norm() <= tol * tolerance_scale(h);
}

bool is_unitary(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  const auto id = ComplexMatrix::Identity(u.rows(), u.cols());
  return (u.adjoint() * u - id).norm() <= tol * tolerance_scale(id);
}

HermEigen herm_eig(const ComplexMatrix& h) {
  require_square(h, "herm_eig");
  const double asym = (h - h.adjoint()).norm();
  if (asym > 1e-9 * tolerance_scale(h)) {
    throw Error(ErrorCode::NotHermitian, "||h - h^dagger||_F = " + std::to_string(asym));
  }
  // Symmetrize so roundoff in the input cannot leak into the spectrum.
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "Hermitian eigensolver did not converge");
  }

  HermEigen out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index c = 0; c < out.eigenvectors.cols(); ++c) {
    auto col = out.eigenvectors.col(c);
    for (Eigen::Index r = 0; r < col.size(); ++r) {
      const double mag = std::abs(col(r));
      if (mag > 1e-10) {
        col *= std::conj(col(r)) / mag;
        col(r) = Complex(std::abs(col(r)), 0.0);
        break;
      }
    }
  }
  return out;
}

ComplexMatrix expm_minus_i(const ComplexMatrix& h, double t) {
  if (t == 0.0) {
    require_square(h, "expm_minus_i");
    return ComplexMatrix::Identity(h.rows(), h.cols());
  }
  const HermEigen eig = herm_eig(h);
  ComplexVector phases(eig.eigenvalues.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::polar(1.0, -t * eig.eigenvalues(k));
  }
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

Complex frob_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "frob_inner operands differ in shape");
  }
  // Column-major storage: both operands share layout, so a flat dot product works.
  return Eigen::Map<const ComplexVector>(a.data(), a.size()).dot(Eigen::Map<const ComplexVector>(b.data(), b.size()));
}

}  // namespace ff
