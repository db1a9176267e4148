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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fidelity_forge/basis.hpp"
#include "fidelity_forge/channels.hpp"
#include "fidelity_forge/errors.hpp"
#include "fidelity_forge/fidelity.hpp"
#include "fidelity_forge/fixtures.hpp"
#include "fidelity_forge/rng.hpp"

using namespace ff;

namespace {

DensityMatrix random_state(Eigen::Index d, Rng& rng) {
  ComplexMatrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = {uniform(rng, -1, 1), uniform(rng, -1, 1)};
  const ComplexMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

DensityMatrix basis_state(Eigen::Index d, Eigen::Index k) {
  DensityMatrix rho = DensityMatrix::Zero(d, d);
  rho(k, k) = 1.0;
  return rho;
}

void check_density(const DensityMatrix& rho) {
  CHECK((rho - rho.adjoint()).norm() < 1e-10);
  CHECK(std::abs(rho.trace() - Complex{1, 0}) < 1e-10);
  CHECK(herm_eig(rho).eigenvalues.minCoeff() >= -1e-9);
}

bool same_action(const Channel& a, const Channel& b, double tol) {
  Rng rng = split_stream(99, {});
  for (int t = 0; t < 5; ++t) {
    const DensityMatrix rho = random_state(a.dim(), rng);
    if ((a(rho) - b(rho)).norm() > tol) return false;
  }
  return true;
}

// vec(ch(x)) from the column-stacking superoperator, built column by column
// from matrix units.
ComplexMatrix superoperator_oracle(const Channel& ch) {
  const Eigen::Index d = ch.dim();
  ComplexMatrix s(d * d, d * d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) {
      ComplexMatrix e = ComplexMatrix::Zero(d, d);
      e(i, j) = 1.0;
      const ComplexMatrix out = ch(e);
      s.col(j * d + i) = Eigen::Map<const ComplexVector>(out.data(), d * d);
    }
  return s;
}

ComplexMatrix partial_trace_first(const ComplexMatrix& rho, Eigen::Index da, Eigen::Index db) {
  ComplexMatrix out = ComplexMatrix::Zero(da, da);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j)
      for (Eigen::Index k = 0; k < db; ++k) out(i, j) += rho(i * db + k, j * db + k);
  return out;
}

}  // namespace

TEST_CASE("unitary channels") {
  const Channel id = unitary_channel(ComplexMatrix::Identity(4, 4));
  Rng rng = split_stream(1, {});
  const DensityMatrix rho = random_state(4, rng);
  CHECK((id(rho) - rho).norm() < 1e-15);
  const Channel x = unitary_channel(pauli_matrix(1));
  CHECK((x(basis_state(2, 0)) - basis_state(2, 1)).norm() < 1e-15);
  const Channel ut = unitary_channel(expm_minus_i(hermitian_from_coeffs(hermitian_table(1)), 1.0));
  for (int t = 0; t < 50; ++t) CHECK(std::abs(ut(random_state(8, rng)).trace() - Complex{1, 0}) < 1e-12);
  ComplexMatrix bad = ComplexMatrix::Identity(2, 2);
  bad(0, 1) = 0.5;
  CHECK_THROWS_AS(unitary_channel(bad), Error);
}

TEST_CASE("Kraus validation") {
  ComplexMatrix k = ComplexMatrix::Identity(2, 2) * 0.9;
  CHECK_THROWS_AS(Channel::from_kraus({k}), Error);
  CHECK_THROWS_AS(Channel::from_kraus({}), Error);
  CHECK_THROWS_AS(Channel::from_kraus({ComplexMatrix::Identity(3, 3)}), Error);
  CHECK_THROWS_AS(Channel::from_kraus({ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(4, 4)}), Error);
}

TEST_CASE("apply") {
  Rng rng = split_stream(2, {});
  const DensityMatrix rho = random_state(4, rng);
  CHECK((ff::apply(depolarizing(2, 1.0), rho) - ComplexMatrix::Identity(4, 4) / 4.0).norm() < 1e-12);
  ComplexVector psi(4);
  for (int i = 0; i < 4; ++i) psi(i) = {uniform(rng, -1, 1), uniform(rng, -1, 1)};
  psi.normalize();
  const ComplexMatrix u = expm_minus_i(hermitian_from_coeffs(random_hermitian(2, rng).coeffs), 0.8);
  const DensityMatrix out = ff::apply(unitary_channel(u), psi * psi.adjoint());
  CHECK(std::abs((out * out).trace() - Complex{1, 0}) < 1e-12);
  const Channel composite = compose(depolarizing(2, 0.3), unitary_channel(u));
  const ComplexVector vec = Eigen::Map<const ComplexVector>(rho.data(), 16);
  const ComplexMatrix via_kraus = ff::apply(composite, rho);
  const ComplexVector via_super = superoperator_oracle(composite) * vec;
  CHECK((Eigen::Map<const ComplexVector>(via_kraus.data(), 16) - via_super).norm() < 1e-10);
  CHECK((superoperator(composite) - superoperator_oracle(composite)).norm() < 1e-10);
  check_density(via_kraus);
  CHECK_THROWS_AS(ff::apply(composite, random_state(2, rng)), Error);
}

TEST_CASE("compose and tensor") {
  Rng rng = split_stream(3, {});
  const ComplexMatrix u = expm_minus_i(random_hermitian(2, rng).matrix, 1.0);
  CHECK(same_action(compose(unitary_channel(u), unitary_channel(u.adjoint())), identity_channel(4), 1e-10));
  const Channel cnot = unitary_channel(cnot_matrix(2, 0, 1));
  CHECK(same_action(compose(cnot, compose(cnot, cnot)), cnot, 1e-10));
  CHECK(same_action(repeat(cnot, 3), cnot, 1e-10));
  CHECK_THROWS_AS(compose(cnot, identity_channel(2)), Error);

  const Channel dep = depolarizing(1, 0.4);
  const Channel joint = tensor(dep, identity_channel(2));
  for (int t = 0; t < 5; ++t) {
    const DensityMatrix a = random_state(2, rng), b = random_state(2, rng);
    const DensityMatrix out = joint(kron(a, b));
    CHECK((out - kron(dep(a), b)).norm() < 1e-12);
    CHECK((partial_trace_first(out, 2, 2) - dep(a)).norm() < 1e-12);
  }
  // Long Kraus lists collapse to at most d^2 operators.
  const Channel deep = repeat(compose(depolarizing(2, 0.1), unitary_channel(u)), 4);
  CHECK(deep.kraus().size() <= 16);
  CHECK(same_action(canonical_kraus(deep), deep, 1e-10));
}

TEST_CASE("depolarizing channel") {
  Rng rng = split_stream(4, {});
  for (int n = 1; n <= 3; ++n) {
    const Eigen::Index d = Eigen::Index{1} << n;
    const DensityMatrix rho = random_state(d, rng);
    const double p = 0.37;
    const ComplexMatrix expected = (1 - p) * rho + p * ComplexMatrix::Identity(d, d) / static_cast<double>(d);
    // Full Pauli twirl: (1-p) rho + p/4^n sum_P P rho P = (1-p) rho + p I/d.
    CHECK((depolarizing(n, p)(rho) - expected).norm() < 1e-12);
  }
  CHECK_THROWS_AS(depolarizing(1, 1.5), Error);
  CHECK_THROWS_AS(depolarizing(1, -0.1), Error);
}

TEST_CASE("U3 matrices") {
  CHECK((u3_matrix(0, 0, 0) - ComplexMatrix::Identity(2, 2)).norm() < 1e-15);
  CHECK((u3_matrix(M_PI, 0, M_PI) - pauli_matrix(1)).norm() < 1e-12);
  ComplexMatrix h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  CHECK((u3_matrix(M_PI / 2, 0, M_PI) - h).norm() < 1e-12);
  Rng rng = split_stream(5, {});
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix u = u3_matrix(uniform(rng, 0, 7), uniform(rng, 0, 7), uniform(rng, 0, 7));
    CHECK(is_unitary(u, 1e-12));
  }
}

TEST_CASE("circuit unitaries") {
  CircuitSpec empty{2, {}};
  CHECK((circuit_unitary(empty) - ComplexMatrix::Identity(4, 4)).norm() < 1e-15);

  // Qubit 0 is the least significant bit: CNOT(0,1) swaps |01> and |11>.
  CircuitSpec cx{2, {CnotGate{0, 1}}};
  ComplexMatrix perm = ComplexMatrix::Zero(4, 4);
  perm(0, 0) = perm(2, 2) = 1.0;
  perm(3, 1) = perm(1, 3) = 1.0;
  CHECK((circuit_unitary(cx) - perm).norm() == 0.0);

  const std::vector<double> zeros(kParameterisedCnotParams, 0.0);
  const ComplexMatrix u = circuit_unitary(parameterised_cnot_spec(zeros));
  CHECK((u - ideal_cnot_02()).norm() < 1e-10);
  CHECK((u - cnot_matrix(3, 0, 2)).norm() < 1e-10);
  ComplexVector in = ComplexVector::Zero(8);
  in(0b001) = 1.0;  // qubit 0 set
  CHECK(std::abs((u * in)(0b101) - Complex{1, 0}) < 1e-10);

  CircuitSpec padded = parameterised_cnot_spec(zeros);
  padded.gates.push_back(U3Gate{1, 0, 0, 0});
  CHECK((circuit_unitary(padded) - u).norm() < 1e-12);

  CHECK_THROWS_AS(parameterised_cnot_spec(std::vector<double>(17, 0.0)), Error);
  CHECK_THROWS_AS(circuit_unitary(CircuitSpec{2, {CnotGate{1, 1}}}), Error);
  CHECK_THROWS_AS(circuit_unitary(CircuitSpec{2, {U3Gate{2, 0, 0, 0}}}), Error);
}

TEST_CASE("circuit unitary equals the gate-by-gate product") {
  Rng rng = split_stream(6, {});
  for (int t = 0; t < 10; ++t) {
    const CircuitSpec spec = random_circuit_spec(rng);
    ComplexMatrix product = ComplexMatrix::Identity(8, 8);
    for (const Gate& g : spec.gates) {
      ComplexMatrix step;
      if (const auto* u3 = std::get_if<U3Gate>(&g)) {
        step = embed_single_qubit(3, u3->target, u3_matrix(u3->theta, u3->phi, u3->lambda));
      } else {
        // Independent CNOT construction from its truth table.
        const auto& c = std::get<CnotGate>(g);
        step = ComplexMatrix::Zero(8, 8);
        for (int b = 0; b < 8; ++b) step(((b >> c.control) & 1) ? b ^ (1 << c.target) : b, b) = 1.0;
      }
      product = step * product;
    }
    CHECK((circuit_unitary(spec) - product).norm() < 1e-10);
    CHECK(is_unitary(circuit_unitary(spec), 1e-9));
  }
}

TEST_CASE("circuit text format") {
  const CircuitSpec spec = parse_circuit("# demo\nqubits 2\nu3 0 3.141592653589793 0 3.141592653589793\ncx 0 1\n");
  CHECK(spec.n_qubits == 2);
  CHECK(spec.gates.size() == 2);
  ComplexVector in = ComplexVector::Zero(4);
  in(0) = 1.0;
  CHECK(std::abs((circuit_unitary(spec) * in)(3)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(parse_circuit("qubits 2\nu3 0 1 2\n"), Error);
  CHECK_THROWS_AS(parse_circuit("qubits 2\nswap 0 1\n"), Error);
}

TEST_CASE("random Hermitian generators") {
  RandomHermitianCoeffs c{2, std::vector<double>(16, 0.0)};
  c.alpha[0] = 0.7;
  CHECK((hermitian_from_coeffs(c) - 0.7 * ComplexMatrix::Identity(4, 4)).norm() < 1e-15);
  const ComplexMatrix ht = hermitian_from_coeffs(hermitian_table(1));
  CHECK(ht.trace().real() == doctest::Approx(8 * 0.45631));
  Rng rng = split_stream(7, {});
  for (int n = 1; n <= 4; ++n) {
    const RandomHermitian r = random_hermitian(n, rng);
    CHECK((r.matrix - r.matrix.adjoint()).norm() < 1e-12);
    for (double a : r.coeffs.alpha) CHECK(std::abs(a) <= 1.0);
  }
}

TEST_CASE("perturbed unitaries") {
  const ComplexMatrix ut = expm_minus_i(hermitian_from_coeffs(hermitian_table(4)), 1.0);
  const ComplexMatrix hr = hermitian_from_coeffs(hermitian_table(5));
  CHECK((perturbed_unitary(ut, hr, 0.0) - ut).norm() < 1e-12);
  const ComplexMatrix close = perturbed_unitary(ut, hr, 1e-4);
  CHECK(is_unitary(close, 1e-9));
  CHECK(process_fidelity_exact(unitary_channel(ut), unitary_channel(close)) > 0.999);
  const ComplexMatrix far = perturbed_unitary(ut, hr, 0.1);
  CHECK(process_fidelity_exact(unitary_channel(ut), unitary_channel(far)) == doctest::Approx(0.569827).epsilon(1e-5));
}

TEST_CASE("random circuits") {
  const CircuitSpec t6 = circuit_from_table("table6");
  CHECK(is_unitary(circuit_unitary(t6), 1e-9));
  CHECK(t6.u3_count() == 10);
  Rng rng = split_stream(8, {});
  const CircuitSpec r = random_circuit_spec(rng);
  const auto params = r.u3_parameters();
  CHECK(params.size() == kRandomCircuitParams);
  for (double p : params) CHECK((p >= 0.0 && p <= 2 * M_PI));
  const auto shifted = perturbed_circuit_spec(r, 0.4, rng).u3_parameters();
  for (std::size_t i = 0; i < params.size(); ++i) CHECK(std::abs(shifted[i] - params[i]) <= 0.4);
}

TEST_CASE("noisy backend") {
  const std::vector<double> zeros(kParameterisedCnotParams, 0.0);
  const CircuitSpec spec = parameterised_cnot_spec(zeros);
  CHECK(same_action(noisy_backend(spec, NoiseConfig::none()), unitary_channel(circuit_unitary(spec)), 1e-10));
  CHECK(same_action(noisy_backend(CircuitSpec{3, {}}, NoiseConfig{0.2, 0.0, 0.0}), identity_channel(8), 1e-12));
  const Channel noisy = noisy_backend(spec, NoiseConfig::defaults());
  const Channel ideal = unitary_channel(ideal_cnot_02());
  const double f1 = process_fidelity_exact(ideal, noisy);
  CHECK(f1 < 1.0);
  CHECK(f1 >= 0.60);
  CHECK(f1 <= 0.85);
  // Systematic errors add up coherently over repeated application.
  const double f3 = process_fidelity_exact(ideal, repeat(noisy, 3));
  CHECK(f3 < f1 * f1 * f1 - 0.005);
  Rng rng = split_stream(9, {});
  for (int t = 0; t < 5; ++t) check_density(noisy(random_state(8, rng)));
  CHECK_THROWS_AS(noisy_backend(spec, NoiseConfig{1.5, 0, 0}), Error);
  CHECK_THROWS_AS(noisy_backend(spec, NoiseConfig{0, 0, 4.0}), Error);
}
