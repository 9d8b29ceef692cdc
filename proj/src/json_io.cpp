#include "regdiv/json_io.hpp"

#include <cmath>
#include <cstdlib>

namespace regdiv {

namespace {

constexpr const char* kParamNames[] = {"mu1", "mu2", "sigma1", "sigma2", "lambda1",
                                       "lambda2", "theta1", "theta2", "rho"};

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <class T>
Json opt(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_same_v<T, double>) return finite_or_null(*v);
  else return Json(*v);
}

Json regime_stats(const RegimeGridStats& s) {
  return {{"points", s.points},
          {"max_hjb", finite_or_null(s.max_hjb)},
          {"max_generator_intervention", finite_or_null(s.max_generator_intervention)},
          {"max_abs_generator_continuation", s.max_abs_generator_continuation},
          {"max_slope_gap_intervention", s.max_slope_gap_intervention},
          {"min_slope_continuation", finite_or_null(s.min_slope_continuation)},
          {"min_slope", finite_or_null(s.min_slope)}};
}

double need_number(const Json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw std::invalid_argument(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

ModelParams params_from_json(const Json& j, ModelParams base, ValidationOptions* opts) {
  if (!j.is_object()) throw std::invalid_argument("parameter file must hold a JSON object");
  // a solve result nests the parameters
  const bool nested = j.contains("params") && j.at("params").is_object();
  const Json& src = nested ? j.at("params") : j;
  auto read_flag = [&](const Json& v) {
    if (!v.is_boolean()) throw std::invalid_argument("'allow_equal_thetas' must be true or false");
    if (opts) opts->allow_equal_thetas = v.get<bool>();
  };
  if (nested && j.contains("allow_equal_thetas")) read_flag(j.at("allow_equal_thetas"));
  for (const auto& [k, v] : src.items()) {
    if (k == "allow_equal_thetas") {
      read_flag(v);
      continue;
    }
    if (!v.is_number()) throw std::invalid_argument("'" + k + "' must be a number");
    base.field(k) = v.get<double>();
  }
  return base;
}

Json to_json(const ModelParams& p) {
  Json j = Json::object();
  for (const char* name : kParamNames) j[name] = p.field(name);
  return j;
}

Policy policy_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("policy must be a JSON object");
  const Json& src = j.contains("policy") ? j.at("policy") : j;
  const auto type = src.at("type").get<std::string>();
  if (type == "liquidate_both") return LiquidateBoth{};
  if (type == "barrier_regime2") return BarrierRegime2{need_number(src, "b2")};
  if (type == "liquidation_barrier")
    return LiquidationBarrier{need_number(src, "d1"), need_number(src, "b1"), need_number(src, "b2"),
                              parse_ordering(src.at("ordering").get<std::string>())};
  throw std::invalid_argument("unknown policy type '" + type + "'");
}

Json to_json(const Policy& p) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, LiquidateBoth>) return {{"type", "liquidate_both"}};
        else if constexpr (std::is_same_v<T, BarrierRegime2>) return {{"type", "barrier_regime2"}, {"b2", v.b2}};
        else
          return {{"type", "liquidation_barrier"},
                  {"ordering", std::string(to_string(v.ordering))},
                  {"d1", v.d1},
                  {"b1", v.b1},
                  {"b2", v.b2}};
      },
      p);
}

Json to_json(const ConditionReport& c) {
  return {{"slope_at_theta2", c.slope_at_theta2},
          {"slope_threshold", c.slope_threshold},
          {"hypothesis", c.hypothesis},
          {"slope_condition", c.slope_condition},
          {"x0", opt(c.x0)},
          {"g_at_x0", opt(c.g_at_x0)},
          {"h_slope_at_d1", opt(c.h_slope_at_d1)},
          {"h_slope_condition", c.h_slope_condition},
          {"q_shortcut", opt(c.q_shortcut)},
          {"ordering_ok", c.ordering_ok},
          {"c6_nonzero", c.c6_nonzero},
          {"optimal", c.optimal},
          {"notes", c.notes}};
}

Json to_json(const VerificationReport& r) {
  Json fits = Json::array();
  for (const auto& f : r.smooth_fit)
    fits.push_back({{"regime", index_of(f.regime) + 1},
                    {"x", f.x},
                    {"label", f.label},
                    {"smoothness", f.smoothness},
                    {"jumps", f.jumps},
                    {"max_jump", f.max_jump}});
  Json j{{"passed", r.passed},
         {"failures", r.failures},
         {"max_smooth_fit", r.max_smooth_fit},
         {"smooth_fit", fits},
         {"hjb_grid", {{"regime1", regime_stats(r.hjb_grid[0])}, {"regime2", regime_stats(r.hjb_grid[1])}}},
         {"gradient_floor", finite_or_null(r.gradient_floor)},
         {"concavity", r.concavity},
         {"tail_generator", finite_or_null(r.tail_generator)},
         {"x_max", r.x_max},
         {"x0", opt(r.x0)}};
  j["conditions"] = r.conditions ? to_json(*r.conditions) : Json(nullptr);
  return j;
}

Json to_json(const PiecewiseValue& w) {
  Json out = Json::object();
  for (Regime r : {Regime::One, Regime::Two}) {
    Json segs = Json::array();
    for (const auto& s : w.segments(r)) {
      Json terms = Json::array();
      for (const auto& t : s.terms) terms.push_back({{"exponent", t.exponent}, {"coeff", t.coeff}, {"anchor", t.anchor}});
      segs.push_back({{"lo", s.lo},
                      {"hi", finite_or_null(s.hi)},
                      {"label", s.label},
                      {"terms", terms},
                      {"intercept", s.intercept},
                      {"slope", s.slope}});
    }
    out[r == Regime::One ? "regime1" : "regime2"] = segs;
  }
  return out;
}

Json to_json(const CaseBSolution& s) {
  return {{"b2", s.b2},         {"C1", s.C1},         {"C2", s.C2},
          {"K1", s.K1},         {"alpha7", s.alpha7}, {"alpha8", s.alpha8},
          {"system_residuals", s.system_residuals}};
}

Json to_json(const CaseCDSolution& s) {
  return {{"ordering", std::string(to_string(s.ordering))},
          {"d1", s.d1},
          {"b1", s.b1},
          {"b2", s.b2},
          {"C", s.C},
          {"hatC", s.hatC},
          {"K1", s.K1},
          {"K2", s.K2},
          {"anchored", s.anchored},
          {"residuals", s.residuals},
          {"residual_norm", s.residual_norm},
          {"iterations", s.iterations},
          {"start_index", s.start_index}};
}

Json to_json(const CandidateAttempt& a) {
  Json j{{"case", std::string(to_string(a.case_tag))},
         {"ordering", a.ordering ? Json(std::string(to_string(*a.ordering))) : Json(nullptr)},
         {"solved", a.solved},
         {"verified", a.verified},
         {"failure", a.failure}};
  j["policy"] = a.policy ? to_json(*a.policy) : Json(nullptr);
  return j;
}

Json to_json(const Selection& s) {
  Json attempts = Json::array();
  for (const auto& a : s.attempts) attempts.push_back(to_json(a));
  Json j{{"case", std::string(to_string(s.case_tag))}};
  j["policy"] = to_json(s.policy);
  j["params"] = to_json(s.params.raw());
  j["allow_equal_thetas"] = s.params.options().allow_equal_thetas;
  j["verified"] = s.report.passed;
  j["tie_with"] = s.tie_with ? Json(std::string(to_string(*s.tie_with))) : Json(nullptr);
  if (s.case_b) j["case_b"] = to_json(*s.case_b);
  if (s.case_cd) j["case_cd"] = to_json(*s.case_cd);
  j["value_function"] = to_json(s.value);
  j["report"] = to_json(s.report);
  j["attempts"] = attempts;
  return j;
}

Json to_json(const SimEstimate& e) {
  return {{"mean", e.mean},
          {"std_error", e.std_error},
          {"n_paths", e.n_paths},
          {"horizon", e.horizon},
          {"discount_tail_bound", e.discount_tail_bound}};
}

Json to_json(const SweepTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json row{{"value", r.value},
             {"verified", r.verified},
             {"case", r.case_tag ? Json(std::string(to_string(*r.case_tag))) : Json(nullptr)}};
    row["policy"] = r.policy ? to_json(*r.policy) : Json(nullptr);
    row["failure"] = r.failure;
    if (r.selection) {
      if (r.selection->case_b) row["case_b"] = to_json(*r.selection->case_b);
      if (r.selection->case_cd) row["case_cd"] = to_json(*r.selection->case_cd);
      row["value_function"] = to_json(r.selection->value);
    }
    rows.push_back(std::move(row));
  }
  return {{"parameter", t.parameter}, {"rows", rows}};
}

Json to_json(const TableReproduction& t) {
  Json cells = Json::array();
  for (const auto& c : t.cells)
    cells.push_back({{"parameter", c.group},
                     {"value", c.value},
                     {"field", c.field},
                     {"reference", c.reference},
                     {"computed", opt(c.computed)},
                     {"abs_diff", opt(c.abs_diff)},
                     {"within", c.within}});
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json row{{"parameter", r.group},
             {"value", r.value},
             {"expected_case", std::string(to_string(r.expected_case))},
             {"expected_ordering",
              r.expected_ordering ? Json(std::string(to_string(*r.expected_ordering))) : Json(nullptr)},
             {"case", r.row.case_tag ? Json(std::string(to_string(*r.row.case_tag))) : Json(nullptr)},
             {"verified", r.row.verified},
             {"case_matches", r.case_matches}};
    row["policy"] = r.row.policy ? to_json(*r.row.policy) : Json(nullptr);
    if (!r.row.failure.empty()) row["failure"] = r.row.failure;
    rows.push_back(std::move(row));
  }
  return {{"table", t.id},      {"caption", t.caption},           {"tolerance", t.tolerance},
          {"passed", t.passed}, {"max_abs_diff", t.max_abs_diff}, {"cells", cells},
          {"rows", rows}};
}

Json to_json(const FigureData& f) {
  Json rows = Json::array();
  for (const auto& r : f.rows) {
    Json row = Json::array();
    for (const auto& c : r) {
      if (const auto* d = std::get_if<double>(&c)) row.push_back(finite_or_null(*d));
      else row.push_back(std::get<std::string>(c));
    }
    rows.push_back(std::move(row));
  }
  return {{"kind", f.kind}, {"columns", f.columns}, {"rows", rows}};
}

Json round_numbers(const Json& j, int precision) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) return nullptr;
    return std::strtod(format_number(v, precision).c_str(), nullptr);
  }
  if (j.is_array()) {
    Json out = Json::array();
    for (const auto& e : j) out.push_back(round_numbers(e, precision));
    return out;
  }
  if (j.is_object()) {
    Json out = Json::object();
    for (const auto& [k, v] : j.items()) out[k] = round_numbers(v, precision);
    return out;
  }
  return j;
}

std::string dump(const Json& j, int precision) { return round_numbers(j, precision).dump(2) + "\n"; }

}  // namespace regdiv
