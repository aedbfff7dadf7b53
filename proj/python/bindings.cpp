#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <vector>

#include "collrf/analytic.hpp"
#include "collrf/errors.hpp"
#include "collrf/figures.hpp"
#include "collrf/inference.hpp"
#include "collrf/io.hpp"
#include "collrf/liouville.hpp"
#include "collrf/validation.hpp"

namespace py = pybind11;
using namespace collrf;

namespace {

py::array_t<double> as_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::tuple spectrum_tuple(const SampledSpectrum& s) { return py::make_tuple(as_array(s.grid), as_array(s.values)); }

SampledSpectrum from_arrays(const std::vector<double>& grid, const std::vector<double>& values) {
  if (grid.size() != values.size()) throw InvalidInput("grid and values differ in length");
  return {grid, values};
}

}  // namespace

PYBIND11_MODULE(_collrf, m) {
  m.doc() = "Collective resonance fluorescence of dipole-coupled two-level emitters";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  auto inference_error = py::register_exception<InferenceError>(m, "InferenceError", base.ptr());
  py::register_exception<MergedRegimeError>(m, "MergedRegimeError", inference_error.ptr());

  py::class_<SystemParams>(m, "SystemParams")
      .def_readonly("n_emitters", &SystemParams::n_emitters)
      .def_readonly("gamma", &SystemParams::gamma)
      .def_readonly("rabi", &SystemParams::rabi)
      .def_readonly("dd_coupling", &SystemParams::dd_coupling)
      .def_readonly("detuning", &SystemParams::detuning)
      .def("secular_ok", &SystemParams::secular_ok)
      .def("warnings", &SystemParams::warnings)
      .def("__repr__", [](const SystemParams& p) {
        return "SystemParams(n_emitters=" + std::to_string(p.n_emitters) + ", rabi=" + io::format_decimal(p.rabi) +
               ", dd_coupling=" + io::format_decimal(p.dd_coupling) +
               ", detuning=" + io::format_decimal(p.detuning) + ")";
      });

  m.def("make_params", &make_params, py::arg("n"), py::arg("rabi"), py::arg("dd_coupling"),
        py::arg("detuning") = 0.0);
  m.def("scaled_coupling", &scaled_coupling, py::arg("delta"), py::arg("n"));

  py::class_<SpectralLine>(m, "SpectralLine")
      .def(py::init<double, double, double>(), py::arg("center"), py::arg("half_width"), py::arg("weight"))
      .def_readwrite("center", &SpectralLine::center)
      .def_readwrite("half_width", &SpectralLine::half_width)
      .def_readwrite("weight", &SpectralLine::weight)
      .def("__call__", &SpectralLine::operator())
      .def("__eq__", [](const SpectralLine& a, const SpectralLine& b) { return a == b; })
      .def("__repr__", [](const SpectralLine& l) {
        return "SpectralLine(" + io::format_decimal(l.center) + ", " + io::format_decimal(l.half_width) + ", " +
               io::format_decimal(l.weight) + ")";
      });

  m.def("general_lines", [](const SystemParams& p) { return general_lines(p).lines; });
  m.def("mollow_limit_lines", [](const SystemParams& p) { return mollow_limit_lines(p).lines; });
  m.def("two_atom_lines", [](const SystemParams& p) { return two_atom_lines(p).lines; });
  m.def("three_atom_lines", [](const SystemParams& p) { return three_atom_lines(p).lines; });
  m.def("model_lines", [](const std::string& model, const SystemParams& p) {
    return model_lines(line_model_from_string(model), p).lines;
  });
  m.def("integrated_weight", [](const std::vector<SpectralLine>& lines) { return integrated_weight(lines); });
  m.def("evaluate_spectrum", [](const std::vector<SpectralLine>& lines, const std::vector<double>& grid) {
    return as_array(evaluate_spectrum(lines, grid).values);
  });
  m.def("default_grid", [](const SystemParams& p) { return as_array(default_grid(p)); });
  m.def("linear_grid", [](double lo, double hi, std::size_t points) { return as_array(linear_grid(lo, hi, points)); });

  m.def("collective_operators", [](int n) {
    const auto ops = collective_operators(n);
    return py::make_tuple(ops.raise, ops.lower, ops.inversion);
  });
  m.def("secular_liouvillian", [](const SystemParams& p) { return build_secular_liouvillian(p).matrix; });
  m.def("bare_liouvillian", [](const SystemParams& p) { return build_bare_liouvillian(p).matrix; });
  m.def("secular_steady_state", [](const SystemParams& p) { return steady_state(build_secular_liouvillian(p)); });
  m.def("bare_steady_state", [](const SystemParams& p) { return steady_state(build_bare_liouvillian(p)); });
  m.def("coherence_decay_rate", [](const SystemParams& p, int n) {
    const auto mode = coherence_decay_rates(build_secular_liouvillian(p), n);
    return py::make_tuple(mode.rate, mode.frequency);
  });
  m.def("dressed_spectrum_oracle", [](const SystemParams& p, const std::vector<double>& grid) {
    py::gil_scoped_release release;
    return dressed_spectrum_oracle(p, grid).values;
  });
  m.def("bare_spectrum_oracle", [](const SystemParams& p, const std::vector<double>& grid) {
    py::gil_scoped_release release;
    return bare_spectrum_oracle(p, grid).values;
  });

  py::class_<Peak>(m, "Peak")
      .def_readonly("location", &Peak::location)
      .def_readonly("height", &Peak::height)
      .def_readonly("prominence", &Peak::prominence)
      .def_readonly("half_width", &Peak::half_width);
  m.def(
      "detect_peaks",
      [](const std::vector<double>& grid, const std::vector<double>& values, double fraction, double relative) {
        return detect_peaks(from_arrays(grid, values), fraction, relative);
      },
      py::arg("grid"), py::arg("values"), py::arg("min_prominence_fraction"),
      py::arg("min_relative_prominence") = 0.0);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("lines", &FitResult::lines)
      .def_readonly("residual_norm", &FitResult::residual_norm)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("converged", &FitResult::converged);
  m.def(
      "fit_lorentzians",
      [](const std::vector<double>& grid, const std::vector<double>& values, const std::vector<SpectralLine>& init,
         int max_iter, double tol) { return fit_lorentzians(from_arrays(grid, values), init, max_iter, tol); },
      py::arg("grid"), py::arg("values"), py::arg("initial"), py::arg("max_iter") = 200, py::arg("tol") = 1e-10);

  py::class_<InferenceResult>(m, "InferenceResult")
      .def_readonly("n_hat", &InferenceResult::n_hat)
      .def_readonly("delta_hat", &InferenceResult::delta_hat)
      .def_readonly("delta_hat_spacing", &InferenceResult::delta_hat_spacing)
      .def_readonly("omega_hat", &InferenceResult::omega_hat)
      .def_readonly("distinguishability", &InferenceResult::distinguishability)
      .def_readonly("warnings", &InferenceResult::warnings);
  m.def(
      "infer_parameters",
      [](const std::vector<SpectralLine>& lines, double tol) { return infer_parameters(lines, tol); },
      py::arg("lines"), py::arg("symmetry_tol") = 0.5);
  m.def(
      "analyze",
      [](const std::vector<double>& grid, const std::vector<double>& values, double smoothing) {
        AnalysisOptions opt;
        opt.smoothing = smoothing;
        const auto a = analyze_spectrum(from_arrays(grid, values), opt);
        return py::make_tuple(a.peaks, a.fit);
      },
      py::arg("grid"), py::arg("values"), py::arg("smoothing") = 0.0);
  m.def(
      "add_noise",
      [](const std::vector<double>& grid, const std::vector<double>& values, double sigma, std::uint64_t seed) {
        return as_array(add_multiplicative_noise(from_arrays(grid, values), sigma, seed).values);
      },
      py::arg("grid"), py::arg("values"), py::arg("sigma"), py::arg("seed"));
  m.def("estimate_mean_distance", &estimate_mean_distance, py::arg("delta_hat"), py::arg("scale_constant"));

  m.def("figure_data", [](int which) { return spectrum_tuple(figure_data(which).scaled); });
  m.def("read_spectrum", [](const std::string& path) { return spectrum_tuple(io::read_spectrum(std::filesystem::path(path)).spectrum); });

  m.def("run_criterion", [](int k) {
    const auto r = validation::run_criterion(k);
    return py::make_tuple(r.name, r.passed, r.detail);
  });
}
