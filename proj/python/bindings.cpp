// Copyright 2026 The GME Activation Authors
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

#include <sstream>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "gme/distill.hpp"
#include "gme/entanglement.hpp"
#include "gme/protocols.hpp"

namespace py = pybind11;
using namespace gme;

namespace {

DensityOperator as_density(const Matrix& m, const std::vector<std::size_t>& dims) {
  return DensityOperator(PartyDims(dims), m);
}

PureState as_pure(const Vector& v, const std::vector<std::size_t>& dims) { return ket(v, PartyDims(dims)); }

py::dict cut_dict(const entanglement::CutRecord& c) {
  py::dict d;
  d["cut"] = c.cut.label();
  d["negativity"] = c.negativity;
  d["schmidt_rank"] = c.schmidt_rank ? py::cast(*c.schmidt_rank) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of gme_activation.";

  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);

  m.def("analytic_Pn", &protocols::analytic_Pn, py::arg("p"), py::arg("n"));

  m.def("build_sigma", [](double p) { return protocols::build_sigma(p).matrix(); }, py::arg("p"));
  m.def("build_prop1_example", [](double p) { return protocols::build_prop1_example(p).matrix(); }, py::arg("p"));
  m.def(
      "build_prop2_state",
      [](const std::vector<double>& a, double p) { return protocols::build_prop2_state(a, p).matrix(); },
      py::arg("schmidt_coeffs"), py::arg("p"));
  m.def(
      "build_prop3_state",
      [](const std::vector<double>& a, const std::vector<double>& w) {
        return protocols::build_prop3_state(a, w).matrix();
      },
      py::arg("schmidt_coeffs"), py::arg("weights"));

  m.def(
      "certify",
      [](const Matrix& rho, const std::vector<std::size_t>& dims) {
        const auto report = entanglement::certify_entangled_all_cuts(as_density(rho, dims));
        py::list cuts;
        for (const auto& c : report.cuts) cuts.append(cut_dict(c));
        py::dict d;
        d["all_cuts_entangled"] = report.all_cuts_entangled;
        d["cuts"] = cuts;
        return d;
      },
      py::arg("rho"), py::arg("dims"));
  m.def(
      "is_gme_pure",
      [](const Vector& v, const std::vector<std::size_t>& dims) {
        return entanglement::certify_gme_pure(as_pure(v, dims)).is_gme;
      },
      py::arg("amplitudes"), py::arg("dims"));
  m.def(
      "svetlichny",
      [](const Vector& v, std::optional<std::array<double, 6>> angles) {
        const auto settings = entanglement::equatorial_settings(angles.value_or(entanglement::ghz_optimal_angles()));
        return entanglement::svetlichny_value(as_pure(v, {2, 2, 2}), settings);
      },
      py::arg("amplitudes"), py::arg("angles") = py::none());

  m.def(
      "recurrence_fidelity",
      [](const Matrix& rho) {
        return distill::bell_fidelity(distill::recurrence_round(as_density(rho, {2, 2})).post_state);
      },
      py::arg("rho"));
  m.def(
      "distill",
      [](const Matrix& rho, int rounds) {
        const auto r = distill::distill_pipeline(as_density(rho, {2, 2}), rounds);
        std::vector<double> fidelities;
        for (const auto& t : r.trajectory) fidelities.push_back(t.fidelity);
        py::dict d;
        d["status"] = distill::to_string(r.status);
        d["alignment"] = r.alignment;
        d["filter_probability"] = r.filter_probability;
        d["fidelities"] = fidelities;
        return d;
      },
      py::arg("rho"), py::arg("rounds") = 3);

  m.def(
      "sigma_scan",
      [](const std::vector<double>& ps, int n_max, std::uint64_t shots, std::uint64_t seed) {
        py::list rows;
        for (const auto& r : protocols::sigma_scan(ps, n_max, shots, seed)) {
          py::dict d;
          d["p"] = r.p;
          d["n"] = r.n;
          d["analytic"] = r.analytic;
          d["empirical"] = r.empirical;
          d["abs_error"] = r.abs_error;
          rows.append(d);
        }
        return rows;
      },
      py::arg("p_values"), py::arg("n_max") = 20, py::arg("shots") = 100000, py::arg("seed") = 42);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> argv{"gme"};
        argv.insert(argv.end(), args.begin(), args.end());
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(argv, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the gme command line in-process; returns (exit_code, stdout, stderr).");
}
