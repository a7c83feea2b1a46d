#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "claimsim/analytics.hpp"
#include "claimsim/config.hpp"
#include "claimsim/error.hpp"
#include "claimsim/harness.hpp"
#include "claimsim/parallel.hpp"
#include "claimsim/runner.hpp"
#include "claimsim/stable.hpp"

namespace py = pybind11;
using namespace claimsim;

namespace {

ExperimentConfig from_text(const std::string& text) { return parse_config_text(text); }

py::dict summaries(const std::string& config_text, double t, std::uint64_t replications,
                   std::uint64_t seed, unsigned threads) {
  const auto c = from_text(config_text);
  const double burnin = c.stationary ? c.burnin : 0.0;
  std::vector<PathSummary> out(replications);
  {
    py::gil_scoped_release release;
    parallel_for(replications, threads, [&](std::size_t r) {
      RngStream rng(seed, stream_id(purpose::kPaths, 0, r));
      out[r] = summarize_path(c.spec, t, rng, burnin);
    });
  }
  py::array_t<double> S(replications), eps(replications), star(replications), tilde(replications);
  py::array_t<std::uint64_t> N(replications), tau(replications);
  auto s = S.mutable_unchecked<1>();
  auto e = eps.mutable_unchecked<1>();
  auto es = star.mutable_unchecked<1>();
  auto et = tilde.mutable_unchecked<1>();
  auto n = N.mutable_unchecked<1>();
  auto k = tau.mutable_unchecked<1>();
  for (std::size_t r = 0; r < replications; ++r) {
    s(r) = out[r].S;
    e(r) = out[r].eps;
    es(r) = out[r].eps_star;
    et(r) = out[r].eps_tilde;
    n(r) = out[r].N;
    k(r) = out[r].tau;
  }
  py::dict d;
  d["S"] = S;
  d["N"] = N;
  d["eps"] = eps;
  d["tau"] = tau;
  d["eps_star"] = star;
  d["eps_tilde"] = tilde;
  return d;
}

std::string verify(const std::string& config_text, unsigned threads, bool with_raw) {
  auto c = from_text(config_text);
  c.threads = threads;
  c.keep_raw = c.keep_raw || with_raw;
  GoFReport report;
  {
    py::gil_scoped_release release;
    report = run_experiment(c);
  }
  auto j = to_json(report);
  j["passed"] = report.passed();
  j["binding"] = report.binding();
  return j.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  static PyObject* error_type = py::exception<Error>(m, "ClaimsimError").inc_ref().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object value = py::reinterpret_borrow<py::object>(error_type)(e.what());
      value.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type, value.ptr());
    }
  });

  m.def("version", &tool_version);
  m.def("analyze", [](const std::string& text) { return analyze(from_text(text)).dump(); },
        py::arg("config_text"));
  m.def("verify", &verify, py::arg("config_text"), py::arg("threads") = 1,
        py::arg("keep_raw") = false);
  m.def("summaries", &summaries, py::arg("config_text"), py::arg("t"), py::arg("replications"),
        py::arg("seed") = 1, py::arg("threads") = 1);
  m.def("config_json", [](const std::string& text) { return to_json(from_text(text)).dump(); },
        py::arg("config_text"));

  m.def("law", [](const std::string& text) { return to_string(parse_law(text)); });
  m.def("survival", [](const std::string& law, double x) { return survival(parse_law(law), x); });
  m.def("quantile", [](const std::string& law, double u) { return quantile(parse_law(law), u); });
  m.def("moment", [](const std::string& law, int order) { return moment(parse_law(law), order); });
  m.def("integrated_survival",
        [](const std::string& law, double t) { return integrated_survival(parse_law(law), t); });
  m.def("borel_pmf", &borel_pmf, py::arg("kappa"), py::arg("k"));
  m.def("positive_stable_laplace", &positive_stable_laplace, py::arg("alpha"), py::arg("lam"));
}
