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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fidelity_forge/commands.hpp"
#include "fidelity_forge/errors.hpp"
#include "fidelity_forge/estimation.hpp"
#include "fidelity_forge/fidelity.hpp"
#include "fidelity_forge/optimize.hpp"

namespace py = pybind11;

namespace {

int qubits_of(const ff::Channel& ch) {
  int n = 0;
  while ((Eigen::Index{1} << n) < ch.dim()) ++n;
  if ((Eigen::Index{1} << n) != ch.dim()) throw ff::Error(ff::ErrorCode::DimensionMismatch, "dimension is not a power of two");
  return n;
}

py::dict profile_dict(const ff::FidelityProfile& p) {
  py::dict d;
  d["process"] = p.process;
  d["zero"] = p.zero;
  d["k"] = p.k_fidelities;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Process fidelity hierarchy, importance-sampled estimators and gate optimization.";

  py::register_exception<ff::Error>(m, "Error", PyExc_RuntimeError);

  py::class_<ff::Channel>(m, "Channel")
      .def_static("from_kraus", &ff::Channel::from_kraus, py::arg("kraus"))
      .def_static("unitary", &ff::unitary_channel, py::arg("u"))
      .def_static(
          "source",
          [](const std::string& source, int qubits, const ff::Channel* base) {
            if (base == nullptr) return ff::resolve_channel_source(source, qubits).channel;
            if (!base->is_unitary()) throw ff::Error(ff::ErrorCode::NotUnitary, "base channel must be unitary");
            return ff::resolve_channel_source(source, qubits, &base->kraus().front()).channel;
          },
          py::arg("source"), py::arg("qubits") = 3, py::arg("base") = nullptr,
          "Channel from the CLI source language, e.g. 'table4' or 'seed:7'. 'perturb:' sources rotate `base`.")
      .def_property_readonly("dim", &ff::Channel::dim)
      .def_property_readonly("kraus", &ff::Channel::kraus)
      .def("__call__", &ff::Channel::operator(), py::arg("rho"));

  m.def("process_fidelity", &ff::process_fidelity_exact, py::arg("target"), py::arg("implemented"));
  m.def(
      "zero_fidelity",
      [](const ff::Channel& lam, const ff::Channel& gam) { return ff::zero_fidelity(lam, gam, ff::hierarchy_basis(qubits_of(lam))); },
      py::arg("target"), py::arg("implemented"));
  m.def(
      "k_fidelity",
      [](const ff::Channel& lam, const ff::Channel& gam, int k) {
        return ff::k_fidelity(lam, gam, k, ff::hierarchy_basis(qubits_of(lam)));
      },
      py::arg("target"), py::arg("implemented"), py::arg("k"));
  m.def(
      "fidelity_profile",
      [](const ff::Channel& lam, const ff::Channel& gam) {
        return profile_dict(ff::fidelity_profile(lam, gam, ff::hierarchy_basis(qubits_of(lam))));
      },
      py::arg("target"), py::arg("implemented"), "Dict with 'process', 'zero' and the list 'k' of k-fidelities.");
  m.def("order_coefficient", &ff::order_coefficient, py::arg("n_qubits"), py::arg("m"));
  m.def("hierarchy_coefficient", &ff::hierarchy_coefficient, py::arg("n_qubits"), py::arg("k"), py::arg("m"));

  m.def(
      "estimate",
      [](const ff::Channel& lam, const ff::Channel& gam, const std::string& kind, int l, long long shots,
         const std::string& mode, std::uint64_t seed) {
        ff::Rng rng = ff::split_stream(seed, {});
        const ff::EstimationMode em = ff::parse_mode(mode);
        if (kind == "zero") return ff::ZeroFidelityEstimator(lam, gam).estimate(l, shots, em, rng, false).value;
        if (kind == "process") return ff::ProcessFidelityEstimator(lam, gam).estimate(l, shots, em, rng, false).value;
        throw ff::Error(ff::ErrorCode::InvalidConfig, "kind must be 'zero' or 'process'");
      },
      py::arg("target"), py::arg("implemented"), py::arg("kind") = "zero", py::arg("l") = 160, py::arg("m") = 0,
      py::arg("mode") = "full_trace", py::arg("seed") = 0);
  m.def(
      "variance_bounds",
      [](const std::string& kind, double f, int d, int l, long long shots) {
        const ff::VarianceBounds b = kind == "process" ? ff::variance_bounds_process(f, d, l, shots)
                                                       : ff::variance_bounds_zero(f, d, l, shots);
        return py::make_tuple(b.lo, b.hi);
      },
      py::arg("kind"), py::arg("fidelity"), py::arg("d"), py::arg("l"), py::arg("m") = 0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> argv{"fidelity-forge"};
        argv.insert(argv.end(), args.begin(), args.end());
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = ff::run_cli(argv, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one CLI invocation in-process; returns (exit_code, stdout, stderr).");
}
