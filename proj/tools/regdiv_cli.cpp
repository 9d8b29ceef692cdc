// regdiv: command-line front end.
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "regdiv/json_io.hpp"
#include "regdiv/mc_sim.hpp"
#include "regdiv/policy.hpp"
#include "regdiv/sweep.hpp"

using namespace regdiv;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNotVerified = 2;

struct Common {
  std::string params_file;
  std::map<std::string, double> inline_params;
  bool allow_equal_thetas = false;
  int precision = 6;
  unsigned threads = 0;
  std::string output;
};

const char* const kParamNames[] = {"mu1", "mu2", "sigma1", "sigma2", "lambda1",
                                   "lambda2", "theta1", "theta2", "rho"};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--params", c.params_file, "JSON file with model parameters (unset names keep the reference set)")
      ->check(CLI::ExistingFile);
  for (const char* name : kParamNames) {
    sub->add_option_function<double>(
        std::string("--") + name, [&c, name](double v) { c.inline_params[name] = v; },
        std::string("override ") + name);
  }
  sub->add_flag("--allow-equal-thetas", c.allow_equal_thetas, "accept theta1 == theta2");
  sub->add_option("--precision", c.precision, "significant digits in numeric output")
      ->capture_default_str()
      ->check(CLI::Range(1, 17));
  sub->add_option("--threads", c.threads, "worker threads (0: REGDIV_THREADS or all cores)")->capture_default_str();
  sub->add_option("-o,--output", c.output, "write the result here instead of stdout");
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

std::pair<ModelParams, ValidationOptions> load_params(const Common& c) {
  ValidationOptions opts;
  ModelParams p = reference_base();
  if (!c.params_file.empty()) p = params_from_json(read_json_file(c.params_file), p, &opts);
  for (const auto& [k, v] : c.inline_params) p.field(k) = v;
  if (c.allow_equal_thetas) opts.allow_equal_thetas = true;
  return {p, opts};
}

void emit(const Common& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(c.output, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + c.output);
  out << text;
}

GridSpec grid_with(int points) {
  GridSpec g;
  if (points > 0) g.points_per_regime = points;
  return g;
}

void print_failures(const VerificationReport& r) {
  for (const auto& f : r.failures) std::cerr << "verification: " << f << '\n';
}

int run_solve(const Common& c, int grid_points) {
  const auto [raw, opts] = load_params(c);
  const auto p = validate(raw, opts);
  SelectOptions so;
  so.grid = grid_with(grid_points);
  try {
    const auto sel = select_policy(p, so);
    emit(c, dump(to_json(sel), c.precision));
    return kOk;
  } catch (const NoVerifiedCaseError& e) {
    Json attempts = Json::array();
    for (const auto& a : e.attempts()) attempts.push_back(to_json(a));
    emit(c, dump(Json{{"case", nullptr}, {"verified", false}, {"attempts", attempts}}, c.precision));
    std::cerr << "regdiv: " << e.what() << '\n';
    return kNotVerified;
  }
}

int run_verify(const Common& c, const std::string& policy_file, int grid_points) {
  const auto [raw, opts] = load_params(c);
  const auto p = validate(raw, opts);
  const GridSpec grid = grid_with(grid_points);
  VerificationReport report;
  Policy policy = LiquidateBoth{};
  if (!policy_file.empty()) {
    policy = policy_from_json(read_json_file(policy_file));
    check_policy(policy, p);
    const auto w = candidate_value(policy, p);
    std::optional<ConditionReport> cond;
    try {
      cond = policy_conditions(w, policy, p);
    } catch (const Error& e) {
      std::cerr << "conditions: " << e.what() << '\n';
    }
    report = verify(w, policy, p, grid, cond);
  } else {
    SelectOptions so;
    so.grid = grid;
    try {
      auto sel = select_policy(p, so);
      policy = sel.policy;
      report = std::move(sel.report);
    } catch (const NoVerifiedCaseError& e) {
      std::cerr << "regdiv: " << e.what() << '\n';
      return kNotVerified;
    }
  }
  Json out{{"policy", to_json(policy)}, {"report", to_json(report)}};
  emit(c, dump(out, c.precision));
  print_failures(report);
  return report.passed ? kOk : kNotVerified;
}

struct SimArgs {
  double x0 = 0.0;
  int regime = 1;
  std::size_t paths = 10000;
  double dt = 1e-4;
  std::uint64_t seed = 1;
  std::optional<double> horizon;
  bool antithetic = false;
  bool bridge = true;
  bool exact_reflection = true;
  std::string policy_file;
  std::string dump_path;
  std::size_t stride = 100;
};

int run_simulate(const Common& c, const SimArgs& a) {
  const auto [raw, opts] = load_params(c);
  const auto p = validate(raw, opts);
  const Regime r = regime_from_int(a.regime);
  SimConfig cfg;
  cfg.dt = a.dt;
  cfg.horizon = a.horizon;
  cfg.n_paths = a.paths;
  cfg.seed = a.seed;
  cfg.antithetic = a.antithetic;
  cfg.bridge_correction = a.bridge;
  cfg.exact_reflection = a.exact_reflection;
  cfg.threads = c.threads;

  Policy policy = LiquidateBoth{};
  std::optional<double> analytic;
  if (!a.policy_file.empty()) {
    policy = policy_from_json(read_json_file(a.policy_file));
    check_policy(policy, p);
    analytic = candidate_value(policy, p).eval(a.x0, r);
  } else {
    const auto sel = select_policy(p);
    policy = sel.policy;
    analytic = value_at(sel, a.x0, r);
  }
  const auto est = estimate_value(policy, p, a.x0, r, cfg);
  Json out{{"policy", to_json(policy)},
           {"x0", a.x0},
           {"regime", a.regime},
           {"dt", a.dt},
           {"seed", a.seed},
           {"antithetic", a.antithetic},
           {"bridge_correction", a.bridge},
           {"exact_reflection", a.exact_reflection},
           {"estimate", to_json(est)}};
  if (analytic) {
    out["analytic"] = *analytic;
    out["difference"] = est.mean - *analytic;
    out["z"] = est.std_error > 0 ? Json((est.mean - *analytic) / est.std_error) : Json(nullptr);
  }
  emit(c, dump(out, c.precision));

  if (!a.dump_path.empty()) {
    FigureSpec fs;
    fs.params = raw;
    fs.validation = opts;
    fs.policy = policy;
    fs.x0 = a.x0;
    fs.regime = a.regime;
    fs.sim = cfg;
    fs.stride = a.stride;
    std::ofstream f(a.dump_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write " + a.dump_path);
    f << to_csv(emit_figure_data("sample_path", fs), c.precision);
  }
  return kOk;
}

struct Range {
  std::string param = "mu2";
  std::optional<double> from, to;
  int steps = 11;
  std::vector<double> values;

  std::vector<double> grid() const {
    if (!values.empty()) return values;
    if (!from || !to) throw std::invalid_argument("give --values or both --from and --to");
    return linspace(*from, *to, steps);
  }
};

void add_range(CLI::App* sub, Range& r) {
  sub->add_option("--param", r.param, "parameter to vary")->capture_default_str();
  sub->add_option("--from", r.from, "first value");
  sub->add_option("--to", r.to, "last value");
  sub->add_option("--steps", r.steps, "number of grid points, ends included")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--values", r.values, "explicit list of values (overrides --from/--to)")->delimiter(',');
}

int run_sweep(const Common& c, const Range& range, const std::string& mode, const std::string& format,
              std::vector<std::string> fields) {
  const auto [raw, opts] = load_params(c);
  SweepOptions so;
  so.mode = mode == "cold" ? SweepMode::Cold : SweepMode::Chained;
  so.validation = opts;
  so.threads = c.threads;
  const auto table = sweep_parameter(raw, range.param, range.grid(), so);
  if (fields.empty()) fields = {"value", "case", "ordering", "d1", "b1", "b2", "verified", "failure"};
  emit(c, format == "json" ? dump(to_json(table), c.precision) : sweep_csv(table, fields, c.precision));
  return kOk;
}

int run_tables(const Common& c, int id, const std::string& format) {
  std::optional<ModelParams> base;
  if (!c.params_file.empty() || !c.inline_params.empty()) base = load_params(c).first;
  SweepOptions so;
  so.validation.allow_equal_thetas = c.allow_equal_thetas;
  std::vector<int> ids = id ? std::vector<int>{id} : table_ids();
  bool all_ok = true;
  Json reports = Json::array();
  std::string csv;
  for (int t : ids) {
    const auto rep = reproduce_table(t, base, so);
    all_ok = all_ok && rep.passed;
    std::cerr << "table " << t << ": max |diff| " << format_number(rep.max_abs_diff, 3) << " (tolerance "
              << rep.tolerance << ") " << (rep.passed ? "ok" : "MISMATCH") << '\n';
    if (format == "csv") {
      std::istringstream lines(table_csv(rep, c.precision));
      std::string line;
      std::getline(lines, line);
      if (csv.empty()) csv = "table," + line + '\n';
      while (std::getline(lines, line)) csv += std::to_string(t) + "," + line + '\n';
    } else {
      reports.push_back(to_json(rep));
    }
  }
  emit(c, format == "csv" ? csv : dump(ids.size() == 1 ? reports.front() : reports, c.precision));
  return all_ok ? kOk : kNotVerified;
}

struct FigureArgs {
  std::string kind;
  std::optional<double> x_min, x_max;
  int points = 401;
  std::string policy_file;
  SimArgs sim;
  Range range;
  std::string format = "csv";
};

int run_figure(const Common& c, FigureArgs& a) {
  const auto [raw, opts] = load_params(c);
  FigureSpec fs;
  fs.params = raw;
  fs.validation = opts;
  fs.x_min = a.x_min;
  fs.x_max = a.x_max;
  fs.points = a.points;
  if (!a.policy_file.empty()) fs.policy = policy_from_json(read_json_file(a.policy_file));
  fs.x0 = a.sim.x0;
  fs.regime = a.sim.regime;
  fs.sim.dt = a.sim.dt;
  fs.sim.seed = a.sim.seed;
  fs.sim.horizon = a.sim.horizon;
  fs.sim.bridge_correction = a.sim.bridge;
  fs.sim.exact_reflection = a.sim.exact_reflection;
  fs.stride = a.sim.stride;
  fs.parameter = a.range.param;
  if (a.kind == "barrier_vs_param") fs.values = a.range.grid();
  const auto fig = emit_figure_data(a.kind, fs);
  emit(c, a.format == "json" ? dump(to_json(fig), c.precision) : to_csv(fig, c.precision));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Optimal dividends with liquidation under a two-regime surplus model.\n"
      "Unset model parameters default to the reference set: mu1=-0.8 mu2=0 sigma1=sigma2=0.5\n"
      "lambda1=10 lambda2=1 theta1=-0.2 theta2=0.2 rho=0.5.\n"
      "Exit codes: 0 success, 1 invalid input, 2 no verified policy or failed check.",
      "regdiv"};
  app.require_subcommand(1);

  Common common;
  int grid_points = 0;
  std::string policy_file, sweep_mode = "chained", format = "csv";
  std::vector<std::string> fields;
  int table_id = 0;
  SimArgs sim;
  Range range;
  FigureArgs fig;

  auto* solve = app.add_subcommand("solve", "select and certify the optimal policy, print it as JSON");
  add_common(solve, common);
  solve->add_option("--grid-points", grid_points, "verification grid points per regime (default 4000)");

  auto* verify_cmd = app.add_subcommand("verify", "run the HJB verifier on a policy (solved if not given)");
  add_common(verify_cmd, common);
  verify_cmd->add_option("--policy", policy_file, "policy JSON (bare policy or a solve result)")
      ->check(CLI::ExistingFile);
  verify_cmd->add_option("--grid-points", grid_points, "verification grid points per regime (default 4000)");

  auto add_sim = [&](CLI::App* sub, SimArgs& s) {
    sub->add_option("--x0", s.x0, "initial surplus")->capture_default_str();
    sub->add_option("--regime", s.regime, "initial regime")->capture_default_str()->check(CLI::IsMember({1, 2}));
    sub->add_option("--dt", s.dt, "Euler step")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--seed", s.seed, "random seed")->capture_default_str();
    sub->add_option("--horizon", s.horizon, "truncation time (default: tail bound below 1e-4)");
    sub->add_flag("!--no-bridge", s.bridge,
                  "check absorption at step ends only (default also tests crossings within a step)");
    sub->add_flag("!--projection", s.exact_reflection,
                  "clip every dt step at the barrier (default: exact reflected steps next to it)");
  };

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of the discounted dividends");
  add_common(simulate, common);
  add_sim(simulate, sim);
  simulate->add_option("--paths", sim.paths, "number of paths")->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_flag("--antithetic", sim.antithetic, "antithetic pairs of Brownian increments");
  simulate->add_option("--policy", sim.policy_file, "simulate this policy instead of the selected one")
      ->check(CLI::ExistingFile);
  simulate->add_option("--dump-path", sim.dump_path, "write the first path as CSV (t, regime, X, D)");
  simulate->add_option("--stride", sim.stride, "keep every n-th Euler step in the dump")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "solve along a parameter grid");
  add_common(sweep, common);
  add_range(sweep, range);
  sweep->add_option("--mode", sweep_mode, "chained (warm starts) or cold (independent rows, parallel)")
      ->capture_default_str()
      ->check(CLI::IsMember({"chained", "cold"}));
  sweep->add_option("--format", format, "csv or json")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--fields", fields, "CSV columns")->delimiter(',')->check(CLI::IsMember(sweep_fields()));

  auto* tables = app.add_subcommand("tables", "reproduce the reference tables and diff them");
  add_common(tables, common);
  tables->add_option("--table", table_id, "table id 2..8 (default: all)")->check(CLI::Range(2, 8));
  std::string tables_format = "json";
  tables->add_option("--format", tables_format, "json or csv")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));

  auto* figure = app.add_subcommand("figure", "emit plot data as CSV");
  add_common(figure, common);
  figure->add_option("--kind", fig.kind, "figure kind")->required()->check(CLI::IsMember(figure_kinds()));
  figure->add_option("--x-min", fig.x_min, "left end of the x grid");
  figure->add_option("--x-max", fig.x_max, "right end of the x grid");
  figure->add_option("--points", fig.points, "x grid points")->capture_default_str()->check(CLI::PositiveNumber);
  figure->add_option("--policy", fig.policy_file, "use this policy instead of the selected one")
      ->check(CLI::ExistingFile);
  add_sim(figure, fig.sim);
  figure->add_option("--stride", fig.sim.stride, "sample_path: keep every n-th Euler step")->capture_default_str();
  add_range(figure, fig.range);
  figure->add_option("--format", fig.format, "csv or json")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*solve) return run_solve(common, grid_points);
    if (*verify_cmd) return run_verify(common, policy_file, grid_points);
    if (*simulate) return run_simulate(common, sim);
    if (*sweep) return run_sweep(common, range, sweep_mode, format, fields);
    if (*tables) return run_tables(common, table_id, tables_format);
    if (*figure) return run_figure(common, fig);
  } catch (const NoVerifiedCaseError& e) {
    std::cerr << "regdiv: " << e.what() << '\n';
    return kNotVerified;
  } catch (const Error& e) {
    std::cerr << "regdiv: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == ErrorCode::NoVerifiedCase ? kNotVerified : kInputError;
  } catch (const std::exception& e) {
    std::cerr << "regdiv: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
