// Python bindings for the ionlight core: rotation angles, thermal bright
// probabilities, Rabi calibration, composite sequences, the fitting entry
// points, and the scenario runners behind the CLI subcommands.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ionlight/calibration.hpp"
#include "ionlight/constants.hpp"
#include "ionlight/dynamics.hpp"
#include "ionlight/modes.hpp"
#include "ionlight/scenario.hpp"

namespace py = pybind11;
using namespace ionlight;

namespace {

std::vector<dynamics::Pulse> named_sequence(const std::string& name,
                                            double theta) {
  if (name == "sk1") return dynamics::sk1_sequence(theta);
  if (name == "tycko") return dynamics::tycko_sequence();
  throw std::invalid_argument("unknown sequence '" + name +
                              "' (expected 'sk1' or 'tycko')");
}

dynamics::SlewIndexing named_indexing(const std::string& name) {
  if (name == "by_gate") return dynamics::SlewIndexing::by_gate;
  if (name == "by_pulse") return dynamics::SlewIndexing::by_pulse;
  throw std::invalid_argument("unknown slew indexing '" + name +
                              "' (expected 'by_gate' or 'by_pulse')");
}

}  // namespace

PYBIND11_MODULE(_ionlight, m) {
  m.doc() =
      "Gaussian-beam ion addressing: rotation angles, thermal gate "
      "fidelities, Rabi calibration, heating fits, and scenario runners.";
  m.attr("__version__") = "1.0.0";

  py::register_exception<scenario::ConfigError>(m, "ConfigError",
                                                PyExc_ValueError);
  py::register_exception<dynamics::ConvergenceError>(m, "ConvergenceError",
                                                     PyExc_RuntimeError);

  auto constants_mod = m.def_submodule("constants", "Physical constants");
  constants_mod.attr("pi") = constants::pi;
  constants_mod.attr("hbar") = constants::hbar;
  constants_mod.attr("atomic_mass_unit") = constants::atomic_mass_unit;
  constants_mod.attr("yb171_mass") = constants::yb171_mass;
  constants_mod.attr("yb171_linewidth") = constants::yb171_linewidth;

  // ---------------------------------------------------------------- dynamics
  py::class_<dynamics::ThetaResult>(m, "ThetaResult")
      .def_readonly("theta", &dynamics::ThetaResult::theta)
      .def_readonly("series_terms", &dynamics::ThetaResult::series_terms)
      .def("__repr__", [](const dynamics::ThetaResult& r) {
        return "ThetaResult(theta=" + std::to_string(r.theta) +
               ", series_terms=" +
               (r.series_terms ? std::to_string(*r.series_terms) : "None") +
               ")";
      });

  m.def("theta_n", &dynamics::theta_n, py::arg("n"), py::arg("eta"),
        py::arg("xi"), py::arg("omega0_t"), py::arg("m_cap") = 2000,
        "Carrier rotation angle for Fock level n at beam offset xi (in "
        "waists).");
  m.def("theta_n_aligned", &dynamics::theta_n_aligned, py::arg("n"),
        py::arg("eta"), py::arg("omega0_t"),
        "Closed-form rotation angle for a beam-centered ion.");
  m.def("theta_profile_aligned", &dynamics::theta_profile_aligned,
        py::arg("n_max"), py::arg("eta"),
        "Angle rates Theta_n / (Omega0 t) for n = 0..n_max at xi = 0.");
  m.def("fock_moment", &dynamics::fock_moment, py::arg("n"), py::arg("m"),
        "Exact diagonal moment <n|(a + adag)^(2m)|n>.");
  m.def("p_up", &dynamics::p_up, py::arg("nbar"), py::arg("eta"),
        py::arg("xi"), py::arg("omega0_t"), py::arg("tail") = 1e-6,
        "Thermal bright-state probability after one pulse.");
  m.def(
      "sequence_p_up",
      [](const std::string& sequence, double nbar, double eta, double xi,
         double base_area, double phase_slew, const std::string& indexing,
         double tail, double theta) {
        return dynamics::sequence_p_up(named_sequence(sequence, theta), nbar,
                                       eta, xi, base_area, phase_slew,
                                       named_indexing(indexing), tail);
      },
      py::arg("sequence"), py::arg("nbar"), py::arg("eta"), py::arg("xi"),
      py::arg("base_area"), py::arg("phase_slew") = 0.0,
      py::arg("indexing") = "by_gate", py::arg("tail") = 1e-6,
      py::arg("theta") = constants::pi,
      "Thermal bright probability after an 'sk1' or 'tycko' composite "
      "sequence.");

  // ------------------------------------------------------------------- modes
  m.def("doppler_nbar", &modes::doppler_nbar, py::arg("linewidth"),
        py::arg("omega"),
        "Doppler-limit thermal occupation of a mode at angular frequency "
        "omega.");
  m.def("zero_point_spread", &modes::zero_point_spread, py::arg("mass"),
        py::arg("omega"), "Ground-state wavepacket size sqrt(hbar/2m omega).");

  // ------------------------------------------------------------- calibration
  py::class_<calibration::RabiCalibration>(m, "RabiCalibration")
      .def_readonly("omega0_t", &calibration::RabiCalibration::omega0_t)
      .def_readonly("p_up", &calibration::RabiCalibration::p_up)
      .def("__repr__", [](const calibration::RabiCalibration& r) {
        return "RabiCalibration(omega0_t=" + std::to_string(r.omega0_t) +
               ", p_up=" + std::to_string(r.p_up) + ")";
      });
  m.def("optimize_rabi", &calibration::optimize_rabi, py::arg("nbar"),
        py::arg("eta"), py::arg("xi") = 0.0, py::arg("tail") = 1e-6,
        py::arg("tol") = 1e-8,
        "Pulse area maximizing the thermal bright probability.");

  py::class_<calibration::HeatingData>(m, "HeatingData")
      .def(py::init<>())
      .def_readwrite("delay", &calibration::HeatingData::delay)
      .def_readwrite("p_up_static", &calibration::HeatingData::p_up_static)
      .def_readwrite("p_up_optimized",
                     &calibration::HeatingData::p_up_optimized)
      .def_readwrite("rabi_ratio", &calibration::HeatingData::rabi_ratio)
      .def_readwrite("sigma_static", &calibration::HeatingData::sigma_static)
      .def_readwrite("sigma_optimized",
                     &calibration::HeatingData::sigma_optimized);

  py::class_<calibration::HeatingFitConfig>(m, "HeatingFitConfig")
      .def(py::init<>())
      .def_readwrite("nbar0", &calibration::HeatingFitConfig::nbar0)
      .def_readwrite("eta", &calibration::HeatingFitConfig::eta)
      .def_readwrite("xi", &calibration::HeatingFitConfig::xi)
      .def_readwrite("sigma", &calibration::HeatingFitConfig::sigma)
      .def_readwrite("ndot_scale", &calibration::HeatingFitConfig::ndot_scale)
      .def_readwrite("simplex_tol",
                     &calibration::HeatingFitConfig::simplex_tol)
      .def_readwrite("max_iterations",
                     &calibration::HeatingFitConfig::max_iterations)
      .def_readwrite("tail", &calibration::HeatingFitConfig::tail)
      .def_readwrite("rabi_tol", &calibration::HeatingFitConfig::rabi_tol);

  py::class_<calibration::HeatingFitResult>(m, "HeatingFitResult")
      .def_readonly("ndot", &calibration::HeatingFitResult::ndot)
      .def_readonly("p_up_offset",
                    &calibration::HeatingFitResult::p_up_offset)
      .def_readonly("chi2", &calibration::HeatingFitResult::chi2)
      .def_readonly("iterations", &calibration::HeatingFitResult::iterations)
      .def_readonly("converged", &calibration::HeatingFitResult::converged)
      .def_readonly("curvature", &calibration::HeatingFitResult::curvature)
      .def("__repr__", [](const calibration::HeatingFitResult& r) {
        return "HeatingFitResult(ndot=" + std::to_string(r.ndot) +
               ", p_up_offset=" + std::to_string(r.p_up_offset) +
               ", converged=" + (r.converged ? "True" : "False") + ")";
      });
  m.def("fit_heating", &calibration::fit_heating, py::arg("data"),
        py::arg("config"),
        "Joint fit of (ndot, p_up_offset) to the measured curves.");

  py::class_<calibration::PowerLawFit>(m, "PowerLawFit")
      .def_readonly("amplitude", &calibration::PowerLawFit::amplitude)
      .def_readonly("exponent", &calibration::PowerLawFit::exponent)
      .def_readonly("residual_norm",
                    &calibration::PowerLawFit::residual_norm)
      .def("__repr__", [](const calibration::PowerLawFit& r) {
        return "PowerLawFit(amplitude=" + std::to_string(r.amplitude) +
               ", exponent=" + std::to_string(r.exponent) + ")";
      });
  m.def("fit_power_law", &calibration::fit_power_law, py::arg("omega"),
        py::arg("rate"),
        "Least-squares power law ndot = amplitude * omega^exponent in "
        "log-log coordinates.");

  // ---------------------------------------------------------------- scenario
  py::class_<scenario::ScenarioConfig>(m, "ScenarioConfig")
      .def_property_readonly(
          "hash", [](const scenario::ScenarioConfig& c) { return c.hash; })
      .def("__repr__", [](const scenario::ScenarioConfig& c) {
        return "<ScenarioConfig ions=" + std::to_string(c.trap.ions) + ">";
      });
  m.def("load_config", &scenario::load_config, py::arg("path"),
        "Parse and validate a scenario configuration file.");
  m.def("parse_config", &scenario::parse_config, py::arg("text"),
        py::arg("base_dir") = std::string(),
        "Parse and validate scenario configuration text.");

  py::class_<scenario::GateModel>(m, "GateModel")
      .def_readonly("eta", &scenario::GateModel::eta)
      .def_readonly("xi", &scenario::GateModel::xi)
      .def_readonly("nbar0", &scenario::GateModel::nbar0)
      .def("__repr__", [](const scenario::GateModel& g) {
        return "GateModel(eta=" + std::to_string(g.eta) +
               ", xi=" + std::to_string(g.xi) +
               ", nbar0=" + std::to_string(g.nbar0) + ")";
      });
  m.def("derive_gate_model", &scenario::derive_gate_model, py::arg("config"),
        "Lamb-Dicke factor, beam offset, and initial occupation for the "
        "addressed ion.");

  py::class_<scenario::CurveOutput>(m, "CurveOutput")
      .def_readonly("columns", &scenario::CurveOutput::columns)
      .def_readonly("rows", &scenario::CurveOutput::rows)
      .def_readonly("metadata", &scenario::CurveOutput::metadata)
      .def("csv", &scenario::CurveOutput::csv);
  m.def("run_delayed_gate", &scenario::run_delayed_gate, py::arg("config"),
        py::arg("threads") = 1u,
        "Static and recalibrated bright-probability curves over the "
        "configured grid.");
  m.def("run_truncation_report", &scenario::run_truncation_report,
        py::arg("config"),
        py::arg("threshold") = std::numeric_limits<double>::quiet_NaN(),
        "CSV truncation report; a non-finite threshold uses the configured "
        "value.");

  py::class_<scenario::FitOutput>(m, "FitOutput")
      .def_readonly("heating", &scenario::FitOutput::heating)
      .def_readonly("base_area", &scenario::FitOutput::base_area)
      .def_readonly("model", &scenario::FitOutput::model);
  m.def("run_fit", &scenario::run_fit, py::arg("config"),
        "Heating-rate fit against the measurement files named in the "
        "configuration.");

  py::class_<scenario::PowerLawOutput>(m, "PowerLawOutput")
      .def_readonly("fit", &scenario::PowerLawOutput::fit)
      .def_readonly("points", &scenario::PowerLawOutput::points);
  m.def("run_power_law", &scenario::run_power_law, py::arg("config"),
        "Power-law fit of heating rate versus mode frequency.");
}
