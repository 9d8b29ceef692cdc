#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "regdiv/json_io.hpp"
#include "regdiv/mc_sim.hpp"
#include "regdiv/policy.hpp"
#include "regdiv/roots.hpp"
#include "regdiv/sweep.hpp"

namespace py = pybind11;
using namespace regdiv;

// Structured values cross the boundary as JSON text; the Python side decodes it.
namespace {

ValidatedParams params_of(const std::string& json_text, bool allow_equal_thetas) {
  ValidationOptions opts;
  const auto raw = params_from_json(Json::parse(json_text), reference_base(), &opts);
  opts.allow_equal_thetas = opts.allow_equal_thetas || allow_equal_thetas;
  return validate(raw, opts);
}

std::string text(const Json& j) { return round_numbers(j, 17).dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "regdiv native core";

  py::register_exception<Error>(m, "RegdivError", PyExc_ValueError);

  py::class_<Selection>(m, "Selection")
      .def_property_readonly("case", [](const Selection& s) { return std::string(to_string(s.case_tag)); })
      .def("value", [](const Selection& s, double x, int regime, int order) {
        return s.value.eval(x, regime_from_int(regime), order);
      }, py::arg("x"), py::arg("regime"), py::arg("order") = 0)
      .def("json", [](const Selection& s) { return text(to_json(s)); });

  m.def("select_policy", [](const std::string& params, bool allow_equal_thetas, int grid_points) {
    SelectOptions so;
    if (grid_points > 0) so.grid.points_per_regime = grid_points;
    py::gil_scoped_release release;
    return select_policy(params_of(params, allow_equal_thetas), so);
  }, py::arg("params"), py::arg("allow_equal_thetas") = false, py::arg("grid_points") = 0);

  m.def("verify_policy", [](const std::string& params, const std::string& policy, bool allow_equal_thetas) {
    const auto p = params_of(params, allow_equal_thetas);
    const Policy pol = policy_from_json(Json::parse(policy));
    check_policy(pol, p);
    const auto w = candidate_value(pol, p);
    std::optional<ConditionReport> cond;
    try {
      cond = policy_conditions(w, pol, p);
    } catch (const Error&) {
    }
    return text(to_json(verify(w, pol, p, GridSpec{}, cond)));
  }, py::arg("params"), py::arg("policy"), py::arg("allow_equal_thetas") = false);

  m.def("candidate_value", [](const std::string& params, const std::string& policy, double x, int regime,
                              bool allow_equal_thetas) {
    const auto p = params_of(params, allow_equal_thetas);
    return candidate_value(policy_from_json(Json::parse(policy)), p).eval(x, regime_from_int(regime));
  }, py::arg("params"), py::arg("policy"), py::arg("x"), py::arg("regime"), py::arg("allow_equal_thetas") = false);

  m.def("estimate_value", [](const std::string& params, const std::string& policy, double x0, int regime,
                             std::size_t n_paths, double dt, std::uint64_t seed, std::optional<double> horizon,
                             bool antithetic, bool bridge, bool exact_reflection, unsigned threads,
                             bool allow_equal_thetas) {
    const auto p = params_of(params, allow_equal_thetas);
    const Policy pol = policy_from_json(Json::parse(policy));
    check_policy(pol, p);
    SimConfig cfg;
    cfg.n_paths = n_paths;
    cfg.dt = dt;
    cfg.seed = seed;
    cfg.horizon = horizon;
    cfg.antithetic = antithetic;
    cfg.bridge_correction = bridge;
    cfg.exact_reflection = exact_reflection;
    cfg.threads = threads;
    py::gil_scoped_release release;
    return text(to_json(estimate_value(pol, p, x0, regime_from_int(regime), cfg)));
  }, py::arg("params"), py::arg("policy"), py::arg("x0"), py::arg("regime"), py::arg("n_paths") = 10000,
        py::arg("dt") = 1e-4, py::arg("seed") = 1, py::arg("horizon") = std::nullopt, py::arg("antithetic") = false,
        py::arg("bridge") = true, py::arg("exact_reflection") = true, py::arg("threads") = 0,
        py::arg("allow_equal_thetas") = false);

  m.def("sweep_parameter", [](const std::string& params, const std::string& parameter,
                              const std::vector<double>& values, bool cold, bool allow_equal_thetas) {
    ValidationOptions opts;
    const auto raw = params_from_json(Json::parse(params), reference_base(), &opts);
    SweepOptions so;
    so.mode = cold ? SweepMode::Cold : SweepMode::Chained;
    so.validation.allow_equal_thetas = opts.allow_equal_thetas || allow_equal_thetas;
    py::gil_scoped_release release;
    return text(to_json(sweep_parameter(raw, parameter, values, so)));
  }, py::arg("params"), py::arg("parameter"), py::arg("values"), py::arg("cold") = false,
        py::arg("allow_equal_thetas") = false);

  m.def("reproduce_table", [](int id) {
    py::gil_scoped_release release;
    return text(to_json(reproduce_table(id)));
  }, py::arg("table_id"));

  m.def("figure_data", [](const std::string& kind, const std::string& params, int points, std::uint64_t seed,
                          double x0, int regime, const std::vector<double>& values, const std::string& parameter) {
    FigureSpec fs;
    fs.params = params_from_json(Json::parse(params), reference_base(), &fs.validation);
    fs.points = points;
    fs.sim.seed = seed;
    fs.x0 = x0;
    fs.regime = regime;
    fs.values = values;
    fs.parameter = parameter;
    return text(to_json(emit_figure_data(kind, fs)));
  }, py::arg("kind"), py::arg("params"), py::arg("points") = 401, py::arg("seed") = 1, py::arg("x0") = 0.5,
        py::arg("regime") = 2, py::arg("values") = std::vector<double>{}, py::arg("parameter") = "mu2");

  m.def("quadratic_roots", [](double mu, double sigma, double lambda, double rho) {
    const auto r = quadratic_roots(mu, sigma, lambda, rho);
    return std::pair{r.positive, r.negative};
  });

  m.def("quartic_roots", [](const std::string& params, const std::string& backend) {
    const auto p = params_of(params, true);
    return quartic_roots(p, backend == "bisection" ? QuarticBackend::Bisection : QuarticBackend::Companion);
  }, py::arg("params"), py::arg("backend") = "companion");

  m.def("case_a_threshold", [](const std::string& params) { return case_a_threshold(params_of(params, true)); });
  m.def("reference_params", []() { return text(to_json(reference_base())); });
}
