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

#include "fidelity_forge/channels.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

#include "fidelity_forge/basis.hpp"
#include "fidelity_forge/errors.hpp"

namespace ff {

namespace {

void require_dims(const Channel& a, const Channel& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": channel dimensions " + std::to_string(a.dim()) +
                                                  " and " + std::to_string(b.dim()) + " differ");
  }
}

/// Kraus operators of the uniform Pauli channel acting on `qubits` of an
/// n-qubit register.
std::vector<ComplexMatrix> local_depolarizing_kraus(int n_qubits, std::span<const int> qubits, double p) {
  const auto k = static_cast<int>(qubits.size());
  const std::size_t terms = std::size_t{1} << (2 * k);
  const auto dim = Eigen::Index{1} << n_qubits;
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(terms);
  const double weight = p / static_cast<double>(terms);
  for (std::size_t t = 0; t < terms; ++t) {
    const double w = t == 0 ? 1.0 - p + weight : weight;
    if (w <= 0.0) continue;
    ComplexMatrix op = ComplexMatrix::Identity(dim, dim);
    const DigitLabel digits = index_to_digits(t, k);
    for (int s = 0; s < k; ++s) {
      const int digit = digits[static_cast<std::size_t>(s)];
      if (digit != 0) op = embed_single_qubit(n_qubits, qubits[static_cast<std::size_t>(s)], pauli_matrix(digit)) * op;
    }
    kraus.push_back(std::sqrt(w) * op);
  }
  return kraus;
}

ComplexMatrix zz_rotation(int n_qubits, int a, int b, double angle) {
  const auto dim = Eigen::Index{1} << n_qubits;
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    const auto parity = ((x >> a) ^ (x >> b)) & 1;
    // Z(x)Z has eigenvalue +1 on even parity.
    out(x, x) = std::polar(1.0, parity == 0 ? -angle : angle);
  }
  return out;
}

void check_qubit(int q, int n, const char* what) {
  if (q < 0 || q >= n) {
    throw Error(ErrorCode::InvalidQubitIndex,
                std::string(what) + " qubit " + std::to_string(q) + " outside register of " + std::to_string(n));
  }
}

}  // namespace

Channel Channel::from_kraus(std::vector<ComplexMatrix> kraus) {
  if (kraus.empty()) throw Error(ErrorCode::DimensionMismatch, "channel needs at least one Kraus operator");
  const Eigen::Index dim = kraus.front().rows();
  if (dim < 2 || (dim & (dim - 1)) != 0) {
    throw Error(ErrorCode::DimensionMismatch, "channel dimension must be a power of two, got " + std::to_string(dim));
  }
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (const auto& k : kraus) {
    if (k.rows() != dim || k.cols() != dim) {
      throw Error(ErrorCode::DimensionMismatch, "Kraus operators must be square and equal-sized");
    }
    sum.noalias() += k.adjoint() * k;
  }
  const double err = (sum - ComplexMatrix::Identity(dim, dim)).norm();
  if (err > 1e-9) {
    throw Error(ErrorCode::OutOfRange, "Kraus operators are not trace preserving (error " + std::to_string(err) + ")");
  }
  return Channel(dim, std::move(kraus));
}

ComplexMatrix Channel::operator()(const ComplexMatrix& x) const {
  if (x.rows() != dim_ || x.cols() != dim_) {
    throw Error(ErrorCode::DimensionMismatch, "operator of size " + std::to_string(x.rows()) +
                                                  " applied to channel of dimension " + std::to_string(dim_));
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim_, dim_);
  ComplexMatrix tmp(dim_, dim_);
  for (const auto& k : kraus_) {
    tmp.noalias() = k * x;
    out.noalias() += tmp * k.adjoint();
  }
  return out;
}

Channel unitary_channel(const ComplexMatrix& u) {
  if (!is_unitary(u, 1e-8)) throw Error(ErrorCode::NotUnitary, "matrix is not unitary within 1e-8");
  return Channel::from_kraus({u});
}

Channel identity_channel(Eigen::Index dim) { return Channel::from_kraus({ComplexMatrix::Identity(dim, dim)}); }

DensityMatrix apply(const Channel& ch, const DensityMatrix& rho) { return ch(rho); }

namespace {

/// Kraus operators sqrt(lambda) unvec(v) from the eigenpairs of a Choi matrix,
/// largest weight first.
Channel kraus_from_choi(const ComplexMatrix& choi, Eigen::Index d) {
  const HermEigen eig = herm_eig(choi);
  std::vector<ComplexMatrix> kraus;
  const double cutoff = 1e-13 * static_cast<double>(d);
  for (Eigen::Index c = eig.eigenvalues.size() - 1; c >= 0; --c) {
    const double lam = eig.eigenvalues(c);
    if (lam <= cutoff) break;
    ComplexVector v = std::sqrt(lam) * eig.eigenvectors.col(c);
    kraus.emplace_back(Eigen::Map<const ComplexMatrix>(v.data(), d, d));
  }
  return Channel::from_kraus(std::move(kraus));
}

/// Choi matrix sum_k vec(K) vec(K)^dagger from the superoperator
/// sum_k conj(K) (x) K; both use column-major vec.
ComplexMatrix choi_from_superoperator(const ComplexMatrix& s, Eigen::Index d) {
  ComplexMatrix choi(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index e = 0; e < d; ++e) choi(a + d * b, c + d * e) = s(c * d + a, e * d + b);
      }
    }
  }
  return choi;
}

}  // namespace

Channel canonical_kraus(const Channel& ch) {
  const Eigen::Index d = ch.dim();
  ComplexMatrix choi = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& k : ch.kraus()) {
    const Eigen::Map<const ComplexVector> v(k.data(), k.size());
    choi.noalias() += v * v.adjoint();
  }
  return kraus_from_choi(choi, d);
}

Channel compose(const Channel& outer, const Channel& inner) {
  require_dims(outer, inner, "compose");
  const Eigen::Index d = outer.dim();
  const auto limit = static_cast<std::size_t>(d * d);
  if (outer.kraus().size() * inner.kraus().size() > limit) {
    // Too many products: compose superoperators and return the minimal Kraus form.
    const ComplexMatrix s = superoperator(outer) * superoperator(inner);
    return kraus_from_choi(choi_from_superoperator(s, d), d);
  }
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(outer.kraus().size() * inner.kraus().size());
  for (const auto& ko : outer.kraus()) {
    for (const auto& ki : inner.kraus()) kraus.push_back(ko * ki);
  }
  return Channel::from_kraus(std::move(kraus));
}

Channel tensor(const Channel& a, const Channel& b) {
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(a.kraus().size() * b.kraus().size());
  for (const auto& ka : a.kraus()) {
    for (const auto& kb : b.kraus()) kraus.push_back(kron(ka, kb));
  }
  return Channel::from_kraus(std::move(kraus));
}

Channel depolarizing(int n_qubits, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::OutOfRange, "depolarizing probability must be in [0, 1]");
  std::vector<int> qubits(static_cast<std::size_t>(n_qubits));
  for (int q = 0; q < n_qubits; ++q) qubits[static_cast<std::size_t>(q)] = q;
  return Channel::from_kraus(local_depolarizing_kraus(n_qubits, qubits, p));
}

ComplexMatrix superoperator(const Channel& ch) {
  const Eigen::Index d = ch.dim();
  ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& k : ch.kraus()) s.noalias() += kron(ComplexMatrix(k.conjugate()), k);
  return s;
}

void CircuitSpec::validate() const {
  if (n_qubits < 1 || n_qubits > 6) throw Error(ErrorCode::InvalidQubitIndex, "circuit qubit count must be 1..6");
  for (const auto& gate : gates) {
    if (const auto* u = std::get_if<U3Gate>(&gate)) {
      check_qubit(u->target, n_qubits, "U3 target");
    } else {
      const auto& c = std::get<CnotGate>(gate);
      check_qubit(c.control, n_qubits, "CNOT control");
      check_qubit(c.target, n_qubits, "CNOT target");
      if (c.control == c.target) throw Error(ErrorCode::InvalidQubitIndex, "CNOT control equals target");
    }
  }
}

std::vector<double> CircuitSpec::u3_parameters() const {
  std::vector<double> out;
  for (const auto& gate : gates) {
    if (const auto* u = std::get_if<U3Gate>(&gate)) out.insert(out.end(), {u->theta, u->phi, u->lambda});
  }
  return out;
}

std::size_t CircuitSpec::u3_count() const {
  std::size_t count = 0;
  for (const auto& gate : gates) count += std::holds_alternative<U3Gate>(gate) ? 1 : 0;
  return count;
}

ComplexMatrix u3_matrix(double theta, double phi, double lambda) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  ComplexMatrix u(2, 2);
  u << c, -std::polar(s, lambda), std::polar(s, phi), std::polar(c, lambda + phi);
  return u;
}

ComplexMatrix embed_single_qubit(int n_qubits, int qubit, const ComplexMatrix& u) {
  check_qubit(qubit, n_qubits, "single-qubit");
  const auto high = Eigen::Index{1} << (n_qubits - 1 - qubit);
  const auto low = Eigen::Index{1} << qubit;
  return kron(kron(ComplexMatrix::Identity(high, high), u), ComplexMatrix::Identity(low, low));
}

ComplexMatrix cnot_matrix(int n_qubits, int control, int target) {
  check_qubit(control, n_qubits, "CNOT control");
  check_qubit(target, n_qubits, "CNOT target");
  if (control == target) throw Error(ErrorCode::InvalidQubitIndex, "CNOT control equals target");
  const auto dim = Eigen::Index{1} << n_qubits;
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    const Eigen::Index y = ((x >> control) & 1) ? (x ^ (Eigen::Index{1} << target)) : x;
    out(y, x) = 1.0;
  }
  return out;
}

ComplexMatrix gate_unitary(int n_qubits, const Gate& gate) {
  if (const auto* u = std::get_if<U3Gate>(&gate)) {
    return embed_single_qubit(n_qubits, u->target, u3_matrix(u->theta, u->phi, u->lambda));
  }
  const auto& c = std::get<CnotGate>(gate);
  return cnot_matrix(n_qubits, c.control, c.target);
}

ComplexMatrix circuit_unitary(const CircuitSpec& spec) {
  spec.validate();
  const auto dim = Eigen::Index{1} << spec.n_qubits;
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  for (const auto& gate : spec.gates) u = gate_unitary(spec.n_qubits, gate) * u;
  return u;
}

CircuitSpec parameterised_cnot_spec(std::span<const double> params) {
  if (params.size() != kParameterisedCnotParams) {
    throw Error(ErrorCode::WrongParameterCount,
                "parameterised CNOT takes 18 parameters, got " + std::to_string(params.size()));
  }
  CircuitSpec spec{3, {}};
  auto layer = [&](std::size_t offset) {
    for (int q = 0; q < 3; ++q) {
      const std::size_t base = offset + 3 * static_cast<std::size_t>(q);
      spec.gates.emplace_back(U3Gate{q, params[base], params[base + 1], params[base + 2]});
    }
  };
  layer(0);
  spec.gates.emplace_back(CnotGate{0, 1});
  spec.gates.emplace_back(CnotGate{1, 2});
  spec.gates.emplace_back(CnotGate{0, 1});
  spec.gates.emplace_back(CnotGate{1, 2});
  layer(9);
  return spec;
}

ComplexMatrix ideal_cnot_02() { return cnot_matrix(3, 0, 2); }

CircuitSpec random_circuit_layout(std::span<const double> params) {
  if (params.size() != kRandomCircuitParams) {
    throw Error(ErrorCode::WrongParameterCount, "random circuit takes 30 parameters, got " + std::to_string(params.size()));
  }
  CircuitSpec spec{3, {}};
  std::size_t next = 0;
  auto u3 = [&](int q) {
    spec.gates.emplace_back(U3Gate{q, params[next], params[next + 1], params[next + 2]});
    next += 3;
  };
  auto entangle = [&] {
    spec.gates.emplace_back(CnotGate{0, 1});
    spec.gates.emplace_back(CnotGate{1, 2});
  };
  u3(0), u3(1), u3(2);
  entangle();
  u3(0), u3(1), u3(2);
  entangle();
  u3(0), u3(1), u3(2);
  u3(0);
  return spec;
}

CircuitSpec random_circuit_spec(Rng& rng) {
  std::vector<double> params(kRandomCircuitParams);
  for (double& p : params) p = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return random_circuit_layout(params);
}

CircuitSpec perturbed_circuit_spec(const CircuitSpec& spec, double spread, Rng& rng) {
  CircuitSpec out = spec;
  for (auto& gate : out.gates) {
    if (auto* u = std::get_if<U3Gate>(&gate)) {
      u->theta += uniform(rng, -spread, spread);
      u->phi += uniform(rng, -spread, spread);
      u->lambda += uniform(rng, -spread, spread);
    }
  }
  return out;
}

CircuitSpec circuit_from_table(std::string_view table_name) { return random_circuit_layout(u3_table(table_name)); }

CircuitSpec parse_circuit(std::string_view text) {
  CircuitSpec spec;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::InvalidConfig, "circuit line " + std::to_string(line_no) + ": " + msg);
  };
  auto number = [&](std::string_view tok) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) fail("bad number '" + std::string(tok) + "'");
    return v;
  };
  auto integer = [&](std::string_view tok) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) fail("bad integer '" + std::string(tok) + "'");
    return v;
  };
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<std::string_view> tok;
    std::size_t pos = 0;
    while (pos < line.size()) {
      const auto start = line.find_first_not_of(" \t\r", pos);
      if (start == std::string_view::npos) break;
      const auto end = line.find_first_of(" \t\r", start);
      tok.push_back(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
      pos = end == std::string_view::npos ? line.size() : end;
    }
    if (tok.empty()) continue;
    if (tok[0] == "qubits" && tok.size() == 2) {
      spec.n_qubits = integer(tok[1]);
    } else if (tok[0] == "u3" && tok.size() == 5) {
      spec.gates.emplace_back(U3Gate{integer(tok[1]), number(tok[2]), number(tok[3]), number(tok[4])});
    } else if (tok[0] == "cx" && tok.size() == 3) {
      spec.gates.emplace_back(CnotGate{integer(tok[1]), integer(tok[2])});
    } else {
      fail("expected 'qubits <n>', 'u3 <q> <theta> <phi> <lambda>' or 'cx <c> <t>'");
    }
  }
  if (spec.n_qubits == 0) throw Error(ErrorCode::InvalidConfig, "circuit file lacks a 'qubits <n>' line");
  spec.validate();
  return spec;
}

ComplexMatrix hermitian_from_coeffs(const RandomHermitianCoeffs& coeffs) {
  const int n = coeffs.n_qubits;
  const auto dim = Eigen::Index{1} << n;
  if (coeffs.alpha.size() != (std::size_t{1} << (2 * n))) {
    throw Error(ErrorCode::DimensionMismatch, "coefficient count must be 4^n");
  }
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < coeffs.alpha.size(); ++i) {
    if (coeffs.alpha[i] == 0.0) continue;
    h += coeffs.alpha[i] * pauli_string(index_to_digits(i, n));
  }
  return h;
}

RandomHermitian random_hermitian(int n_qubits, Rng& rng) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw Error(ErrorCode::TooManyQubits, "random_hermitian supports 1..6 qubits");
  }
  RandomHermitianCoeffs coeffs{n_qubits, std::vector<double>(std::size_t{1} << (2 * n_qubits))};
  for (double& a : coeffs.alpha) a = uniform(rng, -1.0, 1.0);
  ComplexMatrix h = hermitian_from_coeffs(coeffs);
  return {std::move(coeffs), std::move(h)};
}

ComplexMatrix perturbed_unitary(const ComplexMatrix& u_t, const ComplexMatrix& h_r, double eps) {
  if (!is_unitary(u_t, 1e-8)) throw Error(ErrorCode::NotUnitary, "target is not unitary");
  if (u_t.rows() != h_r.rows()) throw Error(ErrorCode::DimensionMismatch, "generator and target differ in dimension");
  const ComplexMatrix rot = expm_minus_i(h_r, eps);
  return rot * u_t * rot.adjoint();
}

void NoiseConfig::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::OutOfRange, std::string(name) + " must be in [0, 1]");
  };
  prob(depolarizing_1q, "depolarizing_1q");
  prob(depolarizing_2q, "depolarizing_2q");
  if (!(std::abs(coherent_zz_angle) <= std::numbers::pi)) {
    throw Error(ErrorCode::OutOfRange, "coherent_zz_angle must be in [-pi, pi]");
  }
}

NoiseConfig NoiseConfig::defaults() { return {0.003, 0.085, 0.185}; }

Channel noisy_backend(const CircuitSpec& spec, const NoiseConfig& noise) {
  spec.validate();
  noise.validate();
  const int n = spec.n_qubits;
  const auto dim = Eigen::Index{1} << n;
  // Runs of unitaries are multiplied directly; the channel itself accumulates
  // as a superoperator and is converted to minimal Kraus form once.
  ComplexMatrix pending = ComplexMatrix::Identity(dim, dim);
  ComplexMatrix super = ComplexMatrix::Identity(dim * dim, dim * dim);
  bool stochastic = false;
  auto push_noise = [&](std::vector<ComplexMatrix> kraus) {
    super = superoperator(Channel::from_kraus(std::move(kraus))) * kron(ComplexMatrix(pending.conjugate()), pending) * super;
    pending.setIdentity();
    stochastic = true;
  };
  for (const auto& gate : spec.gates) {
    pending = gate_unitary(n, gate) * pending;
    if (const auto* u = std::get_if<U3Gate>(&gate)) {
      if (noise.depolarizing_1q > 0.0) {
        const int q[] = {u->target};
        push_noise(local_depolarizing_kraus(n, q, noise.depolarizing_1q));
      }
    } else {
      const auto& c = std::get<CnotGate>(gate);
      if (noise.depolarizing_2q > 0.0) {
        const int q[] = {c.control, c.target};
        push_noise(local_depolarizing_kraus(n, q, noise.depolarizing_2q));
      }
      if (noise.coherent_zz_angle != 0.0) {
        pending = zz_rotation(n, c.control, c.target, noise.coherent_zz_angle) * pending;
      }
    }
  }
  if (!stochastic) return unitary_channel(pending);
  super = kron(ComplexMatrix(pending.conjugate()), pending) * super;
  return kraus_from_choi(choi_from_superoperator(super, dim), dim);
}

Channel repeat(const Channel& ch, int times) {
  if (times < 1) throw Error(ErrorCode::OutOfRange, "repeat count must be >= 1");
  Channel out = ch;
  for (int t = 1; t < times; ++t) out = compose(ch, out);
  return out;
}

}  // namespace ff
