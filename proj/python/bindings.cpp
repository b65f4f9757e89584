#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "mwstats/chains.hpp"
#include "mwstats/dualpath.hpp"
#include "mwstats/errors.hpp"
#include "mwstats/experiments.hpp"
#include "mwstats/qubit.hpp"
#include "mwstats/states.hpp"

namespace py = pybind11;
using namespace mwstats;

namespace {

MicrowaveState make_state(const std::string& kind, double n) {
  switch (state_kind_from_string(kind)) {
    case StateKind::Thermal: return MicrowaveState::thermal(n);
    case StateKind::Coherent: return MicrowaveState::coherent(std::sqrt(n));
    case StateKind::ShotNoise: return MicrowaveState::shot_noise(n);
    case StateKind::Vacuum: return MicrowaveState::vacuum();
  }
  return MicrowaveState::vacuum();
}

std::map<std::string, Complex> moment_dict(const MomentSet& m) {
  std::map<std::string, Complex> out;
  for (const auto& [k, v] : m.entries()) out[std::to_string(k.first) + "," + std::to_string(k.second)] = v;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Photon statistics of propagating microwave fields: core routines";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  m.def("version", &version_string);

  m.def("bose_einstein", [](double f, double t) { return bose_einstein(ModeSpec{f}, t); }, py::arg("frequency"),
        py::arg("temperature"));
  m.def("effective_temperature", [](double f, double n) { return effective_temperature(ModeSpec{f}, n); },
        py::arg("frequency"), py::arg("n"));
  m.def("photon_variance", [](const std::string& kind, double n) { return photon_variance(make_state(kind, n)); },
        py::arg("kind"), py::arg("n"));
  m.def("analytic_moments", [](const std::string& kind, double n) { return moment_dict(analytic_moments(make_state(kind, n))); },
        py::arg("kind"), py::arg("n"), "Normal-ordered moments keyed 'n,m'.");
  m.def("symmetrized_moments",
        [](const std::string& kind, double n) {
          return moment_dict(ordering_convert(analytic_moments(make_state(kind, n)), Ordering::Symmetrized));
        },
        py::arg("kind"), py::arg("n"));

  m.def("dispersive_shift", &dispersive_shift, py::arg("g"), py::arg("delta"), py::arg("alpha"));
  m.def("accumulated_phase", &accumulated_phase, py::arg("chi"), py::arg("kappa_x"));
  m.def("critical_photons", &critical_photons, py::arg("delta"), py::arg("g"));
  m.def("purcell_rate", &purcell_rate, py::arg("kappa_tot"), py::arg("g"), py::arg("delta"));
  m.def("dephasing_rate",
        [](const std::string& kind, double n) { return dephasing_rate(state_kind_from_string(kind), n, reference_system()); },
        py::arg("kind"), py::arg("n"), "Field-induced dephasing [Hz] for the reference sample.");

  m.def("amplify",
        [](double n, double gain_db, double n_n, const std::string& stats) {
          const auto r = amplify(n, JpaStage::from_db(gain_db, n_n, noise_statistics_from_string(stats)));
          return std::make_pair(r.mean, r.variance);
        },
        py::arg("n_jpa"), py::arg("gain_db"), py::arg("n_n"), py::arg("noise_statistics") = "thermal");
  m.def("g2_unnormalized", &g2_unnormalized, py::arg("n"), py::arg("variance"));
  m.def("jpa_polynomial",
        [](double gain_db, double n_n, const std::string& stats) {
          const auto p = jpa_polynomial(JpaStage::from_db(gain_db, n_n, noise_statistics_from_string(stats)));
          return std::map<std::string, double>{{"rho", p.rho}, {"xi", p.xi}, {"offset", p.offset}};
        },
        py::arg("gain_db"), py::arg("n_n"), py::arg("noise_statistics") = "thermal");
  m.def("compression_power_dbm", [](double kappa_x, double t) { return compression_power(kappa_x, t).dbm; },
        py::arg("kappa_x"), py::arg("t_1db"));
  m.def("wigner_gaussian_contour", &wigner_gaussian_contour, py::arg("n"));

  m.def("experiment_names", &experiment_names);
  m.def("default_config_json", [] { return default_config().dump(); });
  m.def("schema_names", &schema_names);
  m.def("schema_text", &schema_text, py::arg("name"));
  m.def("run_experiment_json",
        [](const std::string& config) {
          Json c = default_config();
          merge_config(c, Json::parse(config));
          RunArtifacts a;
          {
            py::gil_scoped_release release;
            a = run_experiment(c);
          }
          std::map<std::string, py::bytes> files;
          for (const auto& [name, text] : a.files) files.emplace(name, py::bytes(text));
          return std::make_pair(a.results.dump(), files);
        },
        py::arg("config"));
  m.def("report_json", [](const std::string& dir) { return build_report(dir).dump(); }, py::arg("run_dir"));
}
