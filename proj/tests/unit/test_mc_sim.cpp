#include <cmath>

#include "helpers.hpp"
#include "regdiv/mc_sim.hpp"

using namespace regdiv;

namespace {

SimConfig quick(std::size_t n, std::uint64_t seed = 11) {
  SimConfig c;
  c.n_paths = n;
  c.seed = seed;
  c.dt = 1e-3;
  c.threads = 1;
  return c;
}

}  // namespace

TEST_SUITE("mc_sim") {
  TEST_CASE("immediate liquidation pays once") {
    const auto p = testing::base(-0.5);
    const auto e = estimate_value(LiquidateBoth{}, p, 0.5, Regime::One, quick(50));
    CHECK(e.mean == doctest::Approx(0.7));
    CHECK(e.std_error == 0.0);
    const auto e2 = estimate_value(LiquidateBoth{}, p, 0.5, Regime::Two, quick(50));
    CHECK(e2.mean == doctest::Approx(0.3));
  }

  TEST_CASE("starting at or below the bankruptcy level pays nothing") {
    const auto p = testing::base(0.9);
    const Policy pol = LiquidationBarrier{0.245, 1.022, 0.845, Ordering::C_b2_lt_b1};
    const auto e = estimate_value(pol, p, -0.2, Regime::One, quick(100));
    CHECK(e.mean == 0.0);
    CHECK(e.std_error == 0.0);
    CHECK(estimate_value(pol, p, 0.1, Regime::Two, quick(100)).mean == 0.0);
  }

  TEST_CASE("deterministic fluid limit") {
    // no noise to speak of and no regime switch: the barrier pays mu2 dt forever
    auto m = reference_params(0.3);
    m.sigma1 = m.sigma2 = 1e-8;
    m.lambda1 = m.lambda2 = 1e-12;
    const auto p = validate(m);
    SimConfig c = quick(4);
    c.horizon = 40.0;
    const auto e = estimate_value(BarrierRegime2{0.5}, p, 0.5, Regime::Two, c);
    const double exact = 0.3 / 0.5 * (1.0 - std::exp(-0.5 * 40.0));
    CHECK(e.mean == doctest::Approx(exact).epsilon(1e-3));
  }

  TEST_CASE("same seed, same answer, whatever the thread count") {
    const auto p = testing::base(0.2);
    SimConfig c = quick(400);
    c.antithetic = true;
    const auto a = estimate_value(BarrierRegime2{0.78}, p, 0.5, Regime::Two, c);
    c.threads = 3;
    const auto b = estimate_value(BarrierRegime2{0.78}, p, 0.5, Regime::Two, c);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    c.seed = 12;
    CHECK(estimate_value(BarrierRegime2{0.78}, p, 0.5, Regime::Two, c).mean != a.mean);
  }

  TEST_CASE("standard error shrinks like one over root n") {
    const auto p = testing::base(0.2);
    const auto a = estimate_value(BarrierRegime2{0.78}, p, 0.5, Regime::Two, quick(2000));
    const auto b = estimate_value(BarrierRegime2{0.78}, p, 0.5, Regime::Two, quick(8000));
    CHECK(b.std_error / a.std_error == doctest::Approx(0.5).epsilon(0.15));
  }

  TEST_CASE("paths pay nonnegative, nondecreasing dividends") {
    const auto p = testing::base(0.9);
    const Policy pol = LiquidationBarrier{0.245, 1.022, 0.845, Ordering::C_b2_lt_b1};
    for (std::uint64_t i = 0; i < 20; ++i) {
      PathRng rng(5, i);
      PathRecorder rec{1, {}};
      const auto res = simulate_path(pol, p, 0.5, Regime::One, quick(1), rng, &rec);
      CHECK(res.discounted_total >= 0.0);
      for (std::size_t k = 1; k < rec.samples.size(); ++k) {
        CHECK(rec.samples[k].dividends >= rec.samples[k - 1].dividends);
        CHECK(rec.samples[k].t >= rec.samples[k - 1].t);
        CHECK(rec.samples[k].x <= action_rule(pol, p, regime_from_int(rec.samples[k].regime)).barrier);
      }
    }
  }

  TEST_CASE("horizon keeps the discounted tail below 1e-4") {
    const auto p = testing::base(1.4);
    const Policy pol = LiquidationBarrier{0.161, 1.132, 0.848, Ordering::D_b2_lt_b1};
    const double T = default_horizon(pol, p, 1.0);
    const double bound = std::exp(-p.rho() * T) * (1.132 + 0.2 + 1.4 / 0.5);
    CHECK(bound <= 1e-4 * (1 + 1e-12));
  }

  TEST_CASE("Case B estimate brackets the analytic value") {
    const auto sel = select_policy(testing::base(0.2));
    SimConfig c = quick(20000);
    c.dt = 1e-4;
    c.antithetic = true;
    c.threads = 0;
    const auto e = estimate_value(sel.policy, sel.params, 0.5, Regime::Two, c);
    CHECK(std::abs(e.mean - value_at(sel, 0.5, Regime::Two)) <= 3 * e.std_error);
  }

  TEST_CASE("a barrier moved far off is beaten by the optimum") {
    const auto sel = select_policy(testing::base(0.2));
    SimConfig c = quick(20000);
    c.dt = 1e-4;
    c.threads = 0;
    const auto low = suboptimality_probe(sel, 0.5, Regime::Two, BarrierRegime2{0.21}, c);
    CHECK(low.dominated);
    CHECK(low.difference < -3 * low.estimate.std_error);
    const auto same = suboptimality_probe(sel, 0.5, Regime::Two, sel.policy, c);
    CHECK(std::abs(same.difference) <= 3 * same.estimate.std_error);
  }
}

TEST_SUITE("mc_sim_slow") {
  TEST_CASE("exact reflected steps agree with clipped Euler steps") {
    const auto sel = select_policy(testing::base(0.9));
    SimConfig c;
    c.n_paths = 20000;
    c.dt = 1e-4;
    c.antithetic = true;
    const auto exact = estimate_value(sel.policy, sel.params, 0.5, Regime::Two, c);
    c.exact_reflection = false;
    const auto clipped = estimate_value(sel.policy, sel.params, 0.5, Regime::Two, c);
    CHECK(std::abs(exact.mean - clipped.mean) < 3 * std::hypot(exact.std_error, clipped.std_error));
  }

  TEST_CASE("halving dt moves the estimate by less than two standard errors") {
    const auto sel = select_policy(testing::base(0.2));
    SimConfig c;
    c.n_paths = 100000;
    c.dt = 1e-4;
    const auto a = estimate_value(sel.policy, sel.params, 0.5, Regime::Two, c);
    c.dt = 5e-5;
    const auto b = estimate_value(sel.policy, sel.params, 0.5, Regime::Two, c);
    CHECK(std::abs(a.mean - b.mean) < 2 * std::hypot(a.std_error, b.std_error));
  }
}
