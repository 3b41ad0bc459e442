#include "chainlab/config.hpp"
#include "chainlab/harness.hpp"
#include "chainlab/meanflow.hpp"
#include "chainlab/potential.hpp"
#include "chainlab/report.hpp"
#include "chainlab/spectral.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace chainlab;

namespace {

// config and report cross the boundary as JSON text; the Python side wraps them in dicts
std::string run_json(const std::string& overrides) {
  Config cfg = default_config();
  merge_config(cfg, nlohmann::ordered_json::parse(overrides));
  ConvergenceReport rep = run_experiment(to_experiment(cfg), to_bounds(cfg));
  return report_json(rep, cfg).dump();
}

}  // namespace

PYBIND11_MODULE(_chainlab, m) {
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);

  m.def("const_c1", &const_c1, py::arg("theta"));
  m.def("const_c2", &const_c2, py::arg("theta"));
  m.def("alpha_hat", [](const std::vector<double>& k, double theta) {
    Dispersion d(theta);
    std::vector<double> out(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) out[i] = d.alpha_hat(k[i]);
    return out;
  }, py::arg("k"), py::arg("theta"));
  m.def("omega", [](const std::vector<double>& k, double theta) {
    Dispersion d(theta);
    std::vector<double> out(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) out[i] = d.omega(k[i]);
    return out;
  }, py::arg("k"), py::arg("theta"));

  py::class_<ScalingSchedule>(m, "Schedule")
      .def(py::init(&schedule), py::arg("theta"))
      .def_readonly("theta", &ScalingSchedule::theta)
      .def("j", &ScalingSchedule::j)
      .def("m", &ScalingSchedule::m)
      .def("n", &ScalingSchedule::n)
      .def("b", &ScalingSchedule::b)
      .def("r", &ScalingSchedule::r);

  m.def("forward_transform", [](const std::vector<double>& v) { return forward_transform(v).values; });
  m.def("inverse_transform", [](const std::vector<cplx>& values) {
    WaveSpectrum s{LatticeGrid(static_cast<int>(values.size()))};
    s.values = values;
    return inverse_transform(s);
  });
  m.def("semigroup_multiplier", &semigroup_multiplier, py::arg("xi"), py::arg("t"), py::arg("sign"),
        py::arg("theta"));

  m.def("default_config", [] { return default_config().dump(); });
  m.def("run_json", &run_json, py::arg("config"), py::call_guard<py::gil_scoped_release>());
}
