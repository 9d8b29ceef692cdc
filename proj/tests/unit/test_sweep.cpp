#include <cmath>

#include "helpers.hpp"
#include "regdiv/sweep.hpp"

using namespace regdiv;

namespace {

double field_of(const SweepRow& r, const char* f) {
  if (const auto* b = std::get_if<BarrierRegime2>(&*r.policy)) return b->b2;
  const auto& lb = std::get<LiquidationBarrier>(*r.policy);
  return f[0] == 'd' ? lb.d1 : f[1] == '1' ? lb.b1 : lb.b2;
}

}  // namespace

TEST_SUITE("sweep") {
  TEST_CASE("mu2 sweep over the single-barrier range") {
    const std::vector<double> mus{-0.39, -0.3, -0.2, 0.0, 0.2, 0.35, 0.4, 0.5, 0.6, 0.64, 0.68};
    const std::vector<double> ref{0.220, 0.388, 0.532, 0.703, 0.780, 0.802, 0.805, 0.806, 0.802, 0.800, 0.797};
    const auto t = sweep_parameter(reference_params(), "mu2", mus);
    REQUIRE(t.rows.size() == mus.size());
    std::size_t peak = 0;
    for (std::size_t i = 0; i < mus.size(); ++i) {
      CAPTURE(mus[i]);
      REQUIRE(t.rows[i].verified);
      CHECK(t.rows[i].case_tag == CaseTag::B);
      CHECK(std::abs(field_of(t.rows[i], "b2") - ref[i]) <= 2e-3);
      if (field_of(t.rows[i], "b2") > field_of(t.rows[peak], "b2")) peak = i;
    }
    CHECK(mus[peak] == doctest::Approx(0.5));
  }

  TEST_CASE("sensitivity trends") {
    const auto mu1 = sweep_parameter(reference_params(0.9), "mu1", {-0.2, -0.4, -0.6, -0.8, -1.0});
    for (std::size_t i = 1; i < mu1.rows.size(); ++i) {
      CHECK(field_of(mu1.rows[i], "d1") > field_of(mu1.rows[i - 1], "d1"));
      CHECK(field_of(mu1.rows[i], "b2") < field_of(mu1.rows[i - 1], "b2"));
      CHECK(field_of(mu1.rows[i], "b1") > field_of(mu1.rows[i - 1], "b1"));
    }
    const auto rho = sweep_parameter(reference_params(0.9), "rho", {0.38, 0.4, 0.5, 0.6, 0.7});
    for (std::size_t i = 1; i < rho.rows.size(); ++i) {
      CHECK(field_of(rho.rows[i], "d1") > field_of(rho.rows[i - 1], "d1"));
      CHECK(field_of(rho.rows[i], "b1") < field_of(rho.rows[i - 1], "b1"));
    }
  }

  TEST_CASE("warm and cold sweeps agree") {
    const auto grid = linspace(-0.5, 2.0, 26);
    SweepOptions warm, cold;
    cold.mode = SweepMode::Cold;
    const auto a = sweep_parameter(reference_params(), "mu2", grid, warm);
    const auto b = sweep_parameter(reference_params(), "mu2", grid, cold);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CAPTURE(grid[i]);
      REQUIRE(a.rows[i].verified == b.rows[i].verified);
      CHECK(a.rows[i].case_tag == b.rows[i].case_tag);
      if (!a.rows[i].verified || a.rows[i].case_tag == CaseTag::A) continue;
      for (const char* f : {"d1", "b1", "b2"}) {
        if (a.rows[i].case_tag == CaseTag::B && f[0] != 'b') continue;
        if (a.rows[i].case_tag == CaseTag::B && f[1] == '1') continue;
        CHECK(std::abs(field_of(a.rows[i], f) - field_of(b.rows[i], f)) < 1e-6);
      }
    }
  }

  TEST_CASE("case ladder is nondecreasing with transitions where expected") {
    const auto grid = linspace(-0.5, 2.0, 251);
    const auto t = sweep_parameter(reference_params(), "mu2", grid);
    int prev = 0;
    std::array<double, 3> first{};  // first mu2 of B, C, D
    for (const auto& r : t.rows) {
      REQUIRE(r.verified);
      const int c = static_cast<int>(*r.case_tag);
      CHECK(c >= prev);
      if (c > prev && c >= 1) first[c - 1] = r.value;
      prev = c;
    }
    CHECK(first[0] == doctest::Approx(-0.39).epsilon(0.011));
    CHECK(first[1] == doctest::Approx(0.69).epsilon(0.011));
    CHECK(first[2] == doctest::Approx(1.10).epsilon(0.011));
  }

  TEST_CASE("tables 3, 7 and 8 against the reference values") {
    const auto t7 = reproduce_table(7);
    CHECK(t7.passed);
    CHECK(t7.cells.size() == 18);
    CHECK(t7.max_abs_diff <= 2e-3);

    const auto t3 = reproduce_table(3);
    CHECK(t3.passed);
    for (const auto& r : t3.rows) {
      const auto& lb = std::get<LiquidationBarrier>(*r.row.policy);
      CHECK((lb.b1 < lb.b2) == (r.value < 0.705));
    }

    const auto t8 = reproduce_table(8);
    CHECK(t8.passed);
    CHECK(std::abs(std::get<BarrierRegime2>(*t8.rows.front().row.policy).b2 + 0.014) <= 2e-3);
  }

  TEST_CASE("figure data") {
    FigureSpec fs;
    fs.points = 50;
    const auto v = emit_figure_data("value_function", fs);
    CHECK(v.columns == std::vector<std::string>{"x", "V1", "V2"});
    CHECK(std::get<double>(v.rows.front()[0]) == doctest::Approx(-0.2));
    CHECK(std::get<double>(v.rows.back()[0]) == doctest::Approx(2.0));

    fs.params = reference_params(0.69);
    const auto g = emit_figure_data("condition_function_G", fs);
    double gmax = -1e9;
    for (const auto& r : g.rows) gmax = std::max(gmax, std::get<double>(r[1]));
    CHECK(gmax > 0.0);

    fs.params = reference_params(0.9);
    const auto h = emit_figure_data("condition_function_H", fs);
    for (const auto& r : h.rows) CHECK(std::get<double>(r[1]) <= 1e-12);

    fs.sim.dt = 1e-3;
    fs.stride = 10;
    const auto p1 = emit_figure_data("sample_path", fs);
    const auto p2 = emit_figure_data("sample_path", fs);
    CHECK(p1.columns == std::vector<std::string>{"t", "regime", "X", "D"});
    CHECK(to_csv(p1) == to_csv(p2));
    CHECK(p1.rows.size() > 2);

    fs.values = {0.2, 0.9};
    const auto bp = emit_figure_data("barrier_vs_param", fs);
    CHECK(std::get<std::string>(bp.rows[0][1]) == "B");
    CHECK(std::get<std::string>(bp.rows[1][1]) == "C");
  }

  TEST_CASE("csv output") {
    const auto t = sweep_parameter(reference_params(), "mu2", {0.2, 0.9});
    const auto csv = sweep_csv(t, {"value", "case", "b2", "verified"}, 3);
    CHECK(csv == "value,case,b2,verified\n0.2,B,0.78,true\n0.9,C,0.845,true\n");
    CHECK(format_number(0.000123456789, 4) == "0.0001235");
  }

  TEST_CASE("unknown sweep parameter") {
    CHECK_THROWS_AS(sweep_parameter(reference_params(), "kappa", {1.0}), std::invalid_argument);
  }
}
