#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "modwhittle/drifter.hpp"
#include "modwhittle/likelihood.hpp"
#include "modwhittle/simulate.hpp"
#include "modwhittle/spectra.hpp"
#include "modwhittle/study.hpp"

namespace py = pybind11;
using namespace modwhittle;

namespace {

py::dict params_dict(const ParameterVector& p) {
  py::dict d;
  for (std::size_t i = 0; i < p.size(); ++i) d[py::str(p.names()[i])] = p[i];
  return d;
}

py::dict fit_dict(const FitResult& r) {
  py::dict d;
  d["theta"] = params_dict(r.theta_hat);
  d["objective"] = r.objective_value;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["starts"] = r.starts;
  return d;
}

Series as_series(const std::vector<cplx>& x, double delta) {
  for (const auto& v : x)
    if (v.imag() != 0.0) return Series::complex(x, delta);
  std::vector<double> re(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) re[i] = x[i].real();
  return Series::real(re, delta);
}

FitOptions options(std::size_t n_starts, std::uint64_t seed) {
  FitOptions o;
  o.n_starts = n_starts;
  o.seed = seed;
  return o;
}

}  // namespace

PYBIND11_MODULE(_modwhittle, m) {
  m.doc() = "Modulated Whittle estimation for nonstationary time series";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<FitFailure>(m, "FitFailure", PyExc_RuntimeError);
  py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);

  m.def("fourier_grid", [](std::size_t n) { return fourier_grid(n).frequencies(); }, py::arg("n"));
  m.def("dft", [](const std::vector<cplx>& x) { return dft(x); }, py::arg("x"));
  m.def("idft", [](const std::vector<cplx>& j) { return idft(j); }, py::arg("j"));
  m.def("periodogram", [](const std::vector<cplx>& x) { return periodogram(x).values; }, py::arg("x"));

  py::class_<LatentModel>(m, "LatentModel")
      .def_static("ar", &LatentModel::ar, py::arg("phi"), py::arg("sigma"))
      .def_static("ma", &LatentModel::ma, py::arg("theta"), py::arg("sigma"))
      .def_static("complex_ar1", &LatentModel::complex_ar1, py::arg("r"), py::arg("sigma"), py::arg("freq") = 0.0)
      .def_static("ou", &LatentModel::ou, py::arg("A"), py::arg("lam"), py::arg("inertial_cpd") = 0.0,
                  py::arg("delta") = kDefaultDelta)
      .def_static("matern", &LatentModel::matern, py::arg("B"), py::arg("h"), py::arg("alpha"),
                  py::arg("delta") = kDefaultDelta)
      .def_static("from_json", [](const std::string& s) { return model_from_json(nlohmann::json::parse(s)); })
      .def("to_json", [](const LatentModel& self) { return to_json(self).dump(); })
      .def_property_readonly("family", [](const LatentModel& self) { return to_string(self.family()); })
      .def_property_readonly("params", [](const LatentModel& self) { return params_dict(self.params()); })
      .def("autocov", &LatentModel::autocov_sequence, py::arg("n"))
      .def("sampled_sdf", &LatentModel::sampled_sdf, py::arg("omega"))
      .def("__repr__", [](const LatentModel& self) { return "LatentModel(" + to_json(self).dump() + ")"; });

  m.def("cg", [](const std::vector<cplx>& g) { return cg_sequence(g).values(); }, py::arg("g"));
  m.def("periodic_missing_mask",
        [](std::size_t k, std::size_t l, std::size_t n) { return periodic_missing_mask(k, l, n).values(); },
        py::arg("k"), py::arg("l"), py::arg("n"));
  m.def("cosine_bernoulli_mask",
        [](double mean, double amp, double freq, std::size_t n, std::uint64_t seed) {
          return cosine_bernoulli_mask(mean, amp, freq, n, seed).values();
        },
        py::arg("mean"), py::arg("amplitude"), py::arg("freq"), py::arg("n"), py::arg("seed"));
  m.def("frequency_modulator", [](const std::vector<double>& beta) { return frequency_modulator(beta).values(); },
        py::arg("beta"));
  m.def("linear_beta", &linear_beta, py::arg("gamma"), py::arg("span"), py::arg("n"));
  m.def("bounded_random_walk_beta", &bounded_random_walk_beta, py::arg("gamma"), py::arg("span"),
        py::arg("step"), py::arg("n"), py::arg("seed"));
  m.def("cg_linear_closed_form", &cg_linear_closed_form, py::arg("gamma"), py::arg("span"), py::arg("n"),
        py::arg("tau"));

  m.def("expected_periodogram",
        [](const std::vector<cplx>& g, const LatentModel& model) {
          return expected_periodogram(cg_sequence(g), model).values;
        },
        py::arg("g"), py::arg("model"));
  m.def("modulated_whittle_nll",
        [](const std::vector<cplx>& x, const std::vector<cplx>& g, const LatentModel& model) {
          return modulated_whittle_nll(periodogram(x), cg_sequence(g), model);
        },
        py::arg("x"), py::arg("g"), py::arg("model"));
  m.def("exact_nll",
        [](const std::vector<cplx>& x, const std::vector<cplx>& g, const LatentModel& model) {
          return exact_gaussian_nll(as_series(x, 1.0), Modulator(g), model);
        },
        py::arg("x"), py::arg("g"), py::arg("model"));

  m.def("fit_modulated",
        [](const std::vector<cplx>& x, const std::vector<cplx>& g, const LatentModel& init, std::size_t n_starts,
           std::uint64_t seed) {
          const auto obj = make_modulated_whittle_objective(periodogram(x), cg_sequence(g), init);
          return fit_dict(fit(obj, init.params(), options(n_starts, seed)));
        },
        py::arg("x"), py::arg("g"), py::arg("init"), py::arg("n_starts") = 3, py::arg("seed") = 0);

  m.def("simulate_latent",
        [](const LatentModel& model, std::size_t n, std::uint64_t seed) {
          return simulate_latent(model, n, seed).values();
        },
        py::arg("model"), py::arg("n"), py::arg("seed"));
  m.def("simulate_modulated",
        [](const LatentModel& model, const std::vector<cplx>& g, std::uint64_t seed) {
          return simulate_modulated(model, Modulator(g), seed).values();
        },
        py::arg("model"), py::arg("g"), py::arg("seed"));
  m.def("simulate_complex_ar1",
        [](double r, double sigma, const std::vector<double>& beta, std::size_t n, std::uint64_t seed) {
          return simulate_complex_ar1(r, sigma, beta, n, seed).values();
        },
        py::arg("r"), py::arg("sigma"), py::arg("beta"), py::arg("n"), py::arg("seed"));

  m.def("run_study",
        [](const std::string& config, bool include_cpu) {
          return run_study(study_from_json(nlohmann::json::parse(config))).to_csv(include_cpu);
        },
        py::arg("config"), py::arg("include_cpu") = false,
        "Runs a Monte Carlo study from its JSON text and returns the report CSV.");

  m.def("inertial_frequency", py::overload_cast<double>(&drifter::inertial_frequency), py::arg("latitude_deg"));
  m.def("fit_drifter_synthetic",
        [](const std::string& config, const std::string& mode, double hi_cpd) {
          const auto traj = drifter::synthetic_trajectory(drifter::synthetic_from_json(nlohmann::json::parse(config)));
          drifter::FitSettings s;
          s.hi_cpd = hi_cpd;
          const auto f = drifter::fit_drifter(traj, drifter::mode_from_string(mode), s);
          py::dict d = fit_dict(f.result);
          d["inv_lambda"] = 1.0 / f.params.lambda;
          return d;
        },
        py::arg("config"), py::arg("mode") = "modulated", py::arg("hi_cpd") = 1.5,
        "Simulates a synthetic drifter trajectory from JSON and fits one model.");
}
