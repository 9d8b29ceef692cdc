#include "regdiv/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace regdiv {

namespace detail {
extern const std::string_view kReferenceTablesJson;
}

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const json& reference_json() {
  static const json doc = json::parse(detail::kReferenceTablesJson);
  return doc;
}

ModelParams params_from(const json& j, ModelParams base) {
  for (const auto& [k, v] : j.items()) base.field(k) = v.get<double>();
  return base;
}

SweepRow solve_row(const ModelParams& base, std::string_view parameter, double value, const SweepOptions& opts,
                   const std::optional<std::array<double, 3>>& hint) {
  SweepRow row;
  row.value = value;
  row.params = base;
  row.params.field(parameter) = value;
  try {
    const auto vp = validate(row.params, opts.validation);
    SelectOptions so = opts.select;
    if (hint) so.seed_hint = hint;
    auto sel = select_policy(vp, so);
    row.verified = true;
    row.case_tag = sel.case_tag;
    row.policy = sel.policy;
    row.selection = std::move(sel);
  } catch (const NoVerifiedCaseError& e) {
    row.failure = e.what();
    // keep the closest miss so the row still carries boundaries
    for (const auto& a : e.attempts())
      if (a.solved && a.policy) {
        row.case_tag = a.case_tag;
        row.policy = a.policy;
        break;
      }
  } catch (const Error& e) {
    row.failure = e.what();
  }
  return row;
}

std::optional<std::array<double, 3>> hint_of(const SweepRow& row) {
  if (!row.policy) return std::nullopt;
  if (const auto* lb = std::get_if<LiquidationBarrier>(&*row.policy)) return std::array{lb->d1, lb->b1, lb->b2};
  return std::nullopt;
}

struct Boundaries {
  double d1 = kNaN, b1 = kNaN, b2 = kNaN;
};

Boundaries boundaries_of(const std::optional<Policy>& policy) {
  Boundaries b;
  if (!policy) return b;
  if (const auto* p2 = std::get_if<BarrierRegime2>(&*policy)) b.b2 = p2->b2;
  if (const auto* lb = std::get_if<LiquidationBarrier>(&*policy)) b = {lb->d1, lb->b1, lb->b2};
  return b;
}

std::optional<double> boundary(const std::optional<Policy>& policy, std::string_view field) {
  const auto b = boundaries_of(policy);
  const double v = field == "d1" ? b.d1 : field == "b1" ? b.b1 : b.b2;
  if (std::isnan(v)) return std::nullopt;
  return v;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c, int precision) {
  if (const auto* d = std::get_if<double>(&c)) return std::isnan(*d) ? std::string() : format_number(*d, precision);
  return csv_escape(std::get<std::string>(c));
}

std::string join_rows(const std::vector<std::string>& columns, const std::vector<std::vector<Cell>>& rows,
                      int precision) {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + cell_text(r[i], precision);
    out += '\n';
  }
  return out;
}

std::string ordering_text(const std::optional<Policy>& p) {
  if (p)
    if (const auto* lb = std::get_if<LiquidationBarrier>(&*p)) return std::string(to_string(lb->ordering));
  return {};
}

PiecewiseValue value_for(const FigureSpec& spec, const ValidatedParams& vp, Policy& policy) {
  if (spec.policy) {
    policy = *spec.policy;
    return candidate_value(policy, vp);
  }
  auto sel = select_policy(vp);
  policy = sel.policy;
  return sel.value;
}

}  // namespace

const std::vector<std::string>& sweep_fields() {
  static const std::vector<std::string> f{"value", "case",   "ordering", "d1",     "b1",      "b2",
                                          "verified", "failure", "mu1",   "mu2",    "sigma1",  "sigma2",
                                          "lambda1", "lambda2", "theta1", "theta2", "rho"};
  return f;
}

std::vector<double> linspace(double from, double to, int n) {
  if (n <= 1) return {from};
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = from + (to - from) * i / (n - 1);
  v.back() = to;
  return v;
}

SweepTable sweep_parameter(const ModelParams& base, std::string_view parameter, const std::vector<double>& values,
                           const SweepOptions& opts) {
  ModelParams probe = base;
  probe.field(parameter);  // rejects unknown names up front
  SweepTable table{std::string(parameter), std::vector<SweepRow>(values.size())};
  if (opts.mode == SweepMode::Chained) {
    std::optional<std::array<double, 3>> hint = opts.select.seed_hint;
    for (std::size_t i = 0; i < values.size(); ++i) {
      table.rows[i] = solve_row(base, parameter, values[i], opts, hint);
      if (auto h = hint_of(table.rows[i])) hint = h;
    }
    return table;
  }
  const unsigned n = std::min<unsigned>(resolve_threads(opts.threads), std::max<std::size_t>(values.size(), 1));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < values.size();)
      table.rows[i] = solve_row(base, parameter, values[i], opts, opts.select.seed_hint);
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
    work();
  }
  return table;
}

ModelParams reference_base() { return params_from(reference_json().at("base"), ModelParams{}); }

std::vector<int> table_ids() {
  std::vector<int> ids;
  for (const auto& t : reference_json().at("tables")) ids.push_back(t.at("id").get<int>());
  return ids;
}

TableReproduction reproduce_table(int id, const std::optional<ModelParams>& base, const SweepOptions& opts) {
  const json* table = nullptr;
  for (const auto& t : reference_json().at("tables"))
    if (t.at("id").get<int>() == id) table = &t;
  if (!table) throw Error(ErrorCode::CaseNotApplicable, "no reference table " + std::to_string(id));

  TableReproduction out;
  out.id = id;
  out.caption = table->at("caption").get<std::string>();
  out.tolerance = table->value("tolerance", reference_json().at("tolerance").get<double>());
  SweepOptions so = opts;
  so.validation.allow_equal_thetas = so.validation.allow_equal_thetas || table->value("allow_equal_thetas", false);

  bool ok = true;
  for (const auto& group : table->at("groups")) {
    const auto parameter = group.at("parameter").get<std::string>();
    const ModelParams gbase = params_from(group.at("overrides"), base.value_or(reference_base()));
    std::vector<double> values;
    for (const auto& r : group.at("rows")) values.push_back(r.at("value").get<double>());
    auto sweep = sweep_parameter(gbase, parameter, values, so);

    const auto& refs = group.at("rows");
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto& ref = refs[i];
      TableRowCheck check;
      check.group = parameter;
      check.value = values[i];
      const auto tag = ref.at("case").get<std::string>();
      check.expected_case = tag == "A" ? CaseTag::A : tag == "B" ? CaseTag::B : tag == "C" ? CaseTag::C : CaseTag::D;
      if (ref.contains("ordering")) check.expected_ordering = parse_ordering(ref.at("ordering").get<std::string>());
      check.row = std::move(sweep.rows[i]);
      check.case_matches = check.row.verified && check.row.case_tag == check.expected_case;
      if (check.case_matches && check.expected_ordering)
        check.case_matches = ordering_text(check.row.policy) == to_string(*check.expected_ordering);
      ok = ok && check.case_matches;

      for (const char* f : {"d1", "b1", "b2"}) {
        if (!ref.contains(f)) continue;
        TableCell cell{parameter, values[i], f, ref.at(f).get<double>(), std::nullopt, std::nullopt, false};
        if (check.row.verified) cell.computed = boundary(check.row.policy, f);
        if (cell.computed) {
          cell.abs_diff = std::abs(*cell.computed - cell.reference);
          cell.within = *cell.abs_diff <= out.tolerance;
          out.max_abs_diff = std::max(out.max_abs_diff, *cell.abs_diff);
        }
        ok = ok && cell.within;
        out.cells.push_back(std::move(cell));
      }
      out.rows.push_back(std::move(check));
    }
  }
  out.passed = ok;
  return out;
}

const std::vector<std::string>& figure_kinds() {
  static const std::vector<std::string> k{"value_function", "condition_function_G", "condition_function_H",
                                          "sample_path", "barrier_vs_param"};
  return k;
}

FigureData emit_figure_data(std::string_view kind, const FigureSpec& spec) {
  FigureData fig;
  fig.kind = std::string(kind);
  if (kind == "barrier_vs_param") {
    fig.columns = {spec.parameter, "case", "ordering", "d1", "b1", "b2", "verified"};
    SweepOptions so;
    so.validation = spec.validation;
    const auto table = sweep_parameter(spec.params, spec.parameter, spec.values, so);
    for (const auto& r : table.rows) {
      const auto b = boundaries_of(r.policy);
      fig.rows.push_back({r.value, r.case_tag ? std::string(to_string(*r.case_tag)) : std::string(),
                          ordering_text(r.policy), b.d1, b.b1, b.b2, r.verified ? 1.0 : 0.0});
    }
    return fig;
  }

  const auto vp = validate(spec.params, spec.validation);
  const double t1 = vp.theta(Regime::One), t2 = vp.theta(Regime::Two);
  const int n = std::max(spec.points, 2);

  if (kind == "value_function") {
    Policy policy = LiquidateBoth{};
    const auto w = value_for(spec, vp, policy);
    const double lo = spec.x_min.value_or(t1);
    const double hi = spec.x_max.value_or(std::max(2.0, max_barrier(policy, vp) + 0.5));
    fig.columns = {"x", "V1", "V2"};
    for (double x : linspace(lo, hi, n)) fig.rows.push_back({x, w.eval(x, Regime::One), w.eval(x, Regime::Two)});
    return fig;
  }
  if (kind == "condition_function_G") {
    const auto sol = solve_case_b(vp);
    fig.columns = {"x", "G"};
    for (double x : linspace(spec.x_min.value_or(t2), spec.x_max.value_or(sol.b2), n))
      fig.rows.push_back({x, condition_function(sol.value, x, vp)});
    return fig;
  }
  if (kind == "condition_function_H") {
    Policy policy = LiquidateBoth{};
    const auto w = value_for(spec, vp, policy);
    const auto* lb = std::get_if<LiquidationBarrier>(&policy);
    if (!lb) throw Error(ErrorCode::CaseNotApplicable, "H needs a liquidation-barrier policy");
    fig.columns = {"x", "H"};
    const double lo = spec.x_min.value_or(lb->d1 > t2 ? t2 : t1);
    for (double x : linspace(lo, spec.x_max.value_or(lb->d1), n))
      fig.rows.push_back({x, condition_function(w, x, vp)});
    return fig;
  }
  if (kind == "sample_path") {
    Policy policy = LiquidateBoth{};
    value_for(spec, vp, policy);
    PathRng rng(spec.sim.seed, 0);
    PathRecorder rec{std::max<std::size_t>(spec.stride, 1), {}};
    simulate_path(policy, vp, spec.x0, regime_from_int(spec.regime), spec.sim, rng, &rec);
    fig.columns = {"t", "regime", "X", "D"};
    for (const auto& s : rec.samples) fig.rows.push_back({s.t, double(s.regime), s.x, s.dividends});
    return fig;
  }
  throw Error(ErrorCode::CaseNotApplicable, "unknown figure kind " + std::string(kind));
}

std::string format_number(double v, int precision) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", std::clamp(precision, 1, 17), v);
  return buf;
}

std::string to_csv(const FigureData& data, int precision) { return join_rows(data.columns, data.rows, precision); }

std::string sweep_csv(const SweepTable& table, const std::vector<std::string>& fields, int precision) {
  std::vector<std::vector<Cell>> rows;
  for (const auto& r : table.rows) {
    const auto b = boundaries_of(r.policy);
    std::vector<Cell> cells;
    for (const auto& f : fields) {
      if (f == "value") cells.emplace_back(r.value);
      else if (f == "case") cells.emplace_back(r.case_tag ? std::string(to_string(*r.case_tag)) : std::string());
      else if (f == "ordering") cells.emplace_back(ordering_text(r.policy));
      else if (f == "d1") cells.emplace_back(b.d1);
      else if (f == "b1") cells.emplace_back(b.b1);
      else if (f == "b2") cells.emplace_back(b.b2);
      else if (f == "verified") cells.emplace_back(std::string(r.verified ? "true" : "false"));
      else if (f == "failure") cells.emplace_back(r.failure);
      else cells.emplace_back(r.params.field(f));
    }
    rows.push_back(std::move(cells));
  }
  return join_rows(fields, rows, precision);
}

std::string table_csv(const TableReproduction& t, int precision) {
  std::vector<std::vector<Cell>> rows;
  for (const auto& c : t.cells)
    rows.push_back({c.group, c.value, c.field, c.reference, c.computed.value_or(kNaN), c.abs_diff.value_or(kNaN),
                    std::string(c.within ? "true" : "false")});
  return join_rows({"parameter", "value", "field", "reference", "computed", "abs_diff", "within"}, rows, precision);
}

}  // namespace regdiv
