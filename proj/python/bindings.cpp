// Python bindings: a thin layer over the config parser, the solver and the CLI.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "gfdiff/cli.hpp"
#include "gfdiff/config.hpp"
#include "gfdiff/error.hpp"
#include "gfdiff/mittag_leffler.hpp"
#include "gfdiff/solution.hpp"

namespace py = pybind11;
using namespace gfdiff;

namespace {

py::dict mfpt_to_dict(const MfptResult& result) {
  py::dict d;
  if (const auto* f = std::get_if<FiniteMfpt>(&result)) {
    d["kind"] = "finite";
    d["tau"] = f->tau;
    d["error"] = f->error;
  } else if (const auto* i = std::get_if<InfiniteMfpt>(&result)) {
    d["kind"] = "infinite";
    d["tail_exponent"] = i->tail_exponent ? py::cast(*i->tail_exponent) : py::none();
  } else {
    d["kind"] = "undefined";
    d["p_infinity"] = std::get<UndefinedMfpt>(result).p_infinity;
  }
  return d;
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"gfdiff"};
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out;
  std::ostringstream err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral solver for g-fractional diffusion in boxes";
  m.attr("__version__") = "0.1.0";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  auto numeric = py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<InconclusiveLimit>(m, "InconclusiveLimit", numeric.ptr());

  m.def("mittag_leffler", [](double alpha, double beta, double x) { return ml_two(alpha, beta, x); },
        py::arg("alpha"), py::arg("beta"), py::arg("x"), "Two-parameter E_{alpha,beta}(x).");
  m.def("config_keys", &config_keys);

  py::class_<SpectralSolution>(m, "Solution")
      .def(py::init([](const std::string& text) { return SpectralSolution(to_scenario(parse_config(text))); }),
           py::arg("config"), "Build from config text (JSON object or key = value lines).")
      .def_property_readonly("lambda_max", &SpectralSolution::lambda_max)
      .def_property_readonly("mode_count", [](const SpectralSolution& s) { return s.modes().size(); })
      .def_property_readonly("t_min", &SpectralSolution::t_min)
      .def("clock", [](const SpectralSolution& s, double t) { return s.scenario().clock(t); })
      .def("field", [](const SpectralSolution& s, const std::vector<double>& r, double t) { return s.field(r, t); },
           py::arg("r"), py::arg("t"))
      .def("survival", &SpectralSolution::survival, py::arg("t"))
      .def("survival_curve",
           [](const SpectralSolution& s, const std::vector<double>& t) { return s.survival_curve(t); })
      .def("fptd", &SpectralSolution::fptd, py::arg("t"))
      .def("fptd_rectangular", &SpectralSolution::fptd_rectangular, py::arg("t"))
      .def("fptd_tail_constant", &SpectralSolution::fptd_tail_constant)
      .def("mfpt", [](const SpectralSolution& s) { return mfpt_to_dict(s.mfpt()); })
      .def("stationary_field",
           [](const SpectralSolution& s, const std::vector<double>& r) { return s.stationary_field(r); })
      .def("asymptotic_survival", &SpectralSolution::asymptotic_survival);

  m.def("run_cli", &run_cli, py::arg("args"), "Run the command-line tool in process; returns (code, stdout, stderr).");
}
