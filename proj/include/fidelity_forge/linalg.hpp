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

#include <complex>

#include <Eigen/Dense>

namespace ff {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Density matrices and observables share the dense complex storage; the
/// names document intent at API boundaries.
using DensityMatrix = ComplexMatrix;
using Observable = ComplexMatrix;

struct HermEigen {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // columns, orthonormal
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
RealMatrix kron(const RealMatrix& a, const RealMatrix& b);

/// Hermitian eigendecomposition. Eigenvalues ascend; each eigenvector's first
/// component of non-negligible magnitude is made real and positive.
/// Throws NotHermitian when ||h - h^dagger||_F > 1e-9 * max(1, ||h||_F).
HermEigen herm_eig(const ComplexMatrix& h);

/// exp(-i t h) for Hermitian h.
ComplexMatrix expm_minus_i(const ComplexMatrix& h, double t);

/// sum_ij conj(a_ij) b_ij, i.e. tr[a^dagger b].
Complex frob_inner(const ComplexMatrix& a, const ComplexMatrix& b);

bool is_hermitian(const ComplexMatrix& h, double tol = 1e-9);
bool is_unitary(const ComplexMatrix& u, double tol = 1e-8);

/// Tolerance scale used throughout: max(1, ||m||_F).
double tolerance_scale(const ComplexMatrix& m);

}  // namespace ff
