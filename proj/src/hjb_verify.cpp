#include "regdiv/hjb_verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "regdiv/case_ab.hpp"
#include "regdiv/case_cd.hpp"
#include "regdiv/roots.hpp"

namespace regdiv {

namespace {

struct Interval {
  double lo, hi;
  bool contains(double x) const { return x > lo && x < hi; }
};

// Continuation region of a regime; empty when lo >= hi.
Interval continuation(const Policy& policy, Regime r, const ValidatedParams& p) {
  const double t = p.theta(r);
  if (const auto* b = std::get_if<BarrierRegime2>(&policy))
    return r == Regime::Two ? Interval{t, b->b2} : Interval{t, t};
  if (const auto* lb = std::get_if<LiquidationBarrier>(&policy))
    return r == Regime::Two ? Interval{t, lb->b2} : Interval{lb->d1, lb->b1};
  return {t, t};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

std::string regime_name(Regime r) { return r == Regime::One ? "regime 1" : "regime 2"; }

// Anchored coefficient of the largest quartic exponent in the regime that owns C3..C6.
double c6_from_value(const PiecewiseValue& w, const LiquidationBarrier& lb, const ValidatedParams& p) {
  const double a6 = quartic_roots(p)[3];
  const Regime owner = lb.ordering == Ordering::C_b2_lt_b1 ? Regime::Two : Regime::One;
  for (const auto& s : w.segments(owner))
    if (s.terms.size() == 4)
      for (const auto& t : s.terms)
        if (std::abs(t.exponent - a6) <= 1e-9 * std::abs(a6)) return t.coeff;
  return 0.0;
}

}  // namespace

double eval(const PiecewiseValue& w, double x, Regime r, int order) { return w.eval(x, r, order); }

double generator_residual(const PiecewiseValue& w, double x, Regime r, const ValidatedParams& p, Side side) {
  const double s = p.sigma(r), lam = p.lambda(r);
  return 0.5 * s * s * w.eval_side(x, r, 2, side) + p.mu(r) * w.eval_side(x, r, 1, side) -
         (lam + p.rho()) * w.eval_side(x, r, 0, side) + lam * w.eval_side(x, other(r), 0, side);
}

ConditionReport policy_conditions(const PiecewiseValue& w, const Policy& policy, const ValidatedParams& p) {
  if (const auto* b = std::get_if<BarrierRegime2>(&policy)) return case_b_conditions(p, w, b->b2);
  if (const auto* lb = std::get_if<LiquidationBarrier>(&policy))
    return case_cd_conditions(p, w, *lb, c6_from_value(w, *lb, p));
  ConditionReport rep;
  rep.optimal = p.mu(Regime::Two) <= case_a_threshold(p);
  if (!rep.optimal) rep.notes.push_back("mu2 above the immediate-liquidation threshold");
  return rep;
}

VerificationReport verify(const PiecewiseValue& w, const Policy& policy, const ValidatedParams& p,
                          const GridSpec& grid, std::optional<ConditionReport> conditions) {
  VerificationReport rep;
  const Tolerances& tol = grid.tol;
  try {
    check_policy(policy, p);
  } catch (const Error& e) {
    rep.failures.push_back(e.what());
  }

  // smooth fit at every junction, to the declared class
  const auto junctions = w.junctions();
  for (const auto& j : junctions) {
    JunctionResidual jr{j.regime, j.x, j.smoothness, j.label, {}, 0.0};
    for (int k = 0; k <= std::min(j.smoothness, 2); ++k) {
      jr.jumps[k] = w.eval_side(j.x, j.regime, k, Side::Right) - w.eval_side(j.x, j.regime, k, Side::Left);
      jr.max_jump = std::max(jr.max_jump, std::abs(jr.jumps[k]));
      if (std::abs(jr.jumps[k]) > tol.equality)
        rep.failures.push_back("smooth fit at " + j.label + " (" + regime_name(j.regime) + ", order " +
                               std::to_string(k) + "): jump " + fmt(jr.jumps[k]));
    }
    rep.max_smooth_fit = std::max(rep.max_smooth_fit, jr.max_jump);
    rep.smooth_fit.push_back(jr);
  }

  const double top = max_barrier(policy, p);
  rep.x_max = top + 5.0 * std::max(p.sigma(Regime::One), p.sigma(Regime::Two)) / std::sqrt(p.rho());

  std::vector<double> marks;
  for (const auto& j : junctions) marks.push_back(j.x);
  if (const auto* lb = std::get_if<LiquidationBarrier>(&policy)) marks.insert(marks.end(), {lb->d1, lb->b1, lb->b2});
  if (const auto* b = std::get_if<BarrierRegime2>(&policy)) marks.push_back(b->b2);
  marks.push_back(p.theta(Regime::One));
  marks.push_back(p.theta(Regime::Two));
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  const double b_reflect = std::visit(
      [&](const auto& pol) -> double {
        using T = std::decay_t<decltype(pol)>;
        if constexpr (std::is_same_v<T, LiquidateBoth>) return p.theta(Regime::Two);
        else return pol.b2;
      },
      policy);

  for (Regime r : {Regime::One, Regime::Two}) {
    const double t = p.theta(r);
    std::vector<double> xs;
    const int n = std::max(grid.points_per_regime, 1);
    for (int k = 1; k <= n; ++k) xs.push_back(t + (rep.x_max - t) * k / n);
    const int side_pts = std::max(grid.cluster_points / 2, 1);
    for (double m : marks) {
      for (int k = 0; k < side_pts; ++k) {
        const double frac = side_pts == 1 ? 0.0 : static_cast<double>(k) / (side_pts - 1);
        const double d = grid.cluster_width * std::pow(grid.junction_offset / grid.cluster_width, frac);
        xs.push_back(m - d);
        xs.push_back(m + d);
      }
    }
    const Interval cont = continuation(policy, r, p);
    auto& st = rep.hjb_grid[index_of(r)];
    for (double x : xs) {
      if (!(x > t) || x > rep.x_max) continue;
      const bool on_mark = std::any_of(marks.begin(), marks.end(), [&](double m) { return std::abs(x - m) < 1e-12; });
      if (on_mark) continue;
      ++st.points;
      const double slope = w.eval(x, r, 1);
      const double gen = generator_residual(w, x, r, p);
      st.max_hjb = std::max(st.max_hjb, std::max(gen, 1.0 - slope));
      st.min_slope = std::min(st.min_slope, slope);
      if (cont.contains(x)) {
        st.max_abs_generator_continuation = std::max(st.max_abs_generator_continuation, std::abs(gen));
        st.min_slope_continuation = std::min(st.min_slope_continuation, slope);
      } else {
        st.max_generator_intervention = std::max(st.max_generator_intervention, gen);
        st.max_slope_gap_intervention = std::max(st.max_slope_gap_intervention, std::abs(slope - 1.0));
      }
      if (r == Regime::Two && x < b_reflect) rep.concavity = std::max(rep.concavity, w.eval(x, r, 2));
    }
    rep.gradient_floor = std::min(rep.gradient_floor, st.min_slope_continuation);

    const std::string name = regime_name(r);
    if (st.max_hjb > tol.inequality) rep.failures.push_back("HJB violated in " + name + ": " + fmt(st.max_hjb));
    if (st.max_abs_generator_continuation > tol.inequality)
      rep.failures.push_back("generator residual in continuation region of " + name + ": " +
                             fmt(st.max_abs_generator_continuation));
    if (st.min_slope_continuation < 1.0 - tol.inequality)
      rep.failures.push_back("slope below 1 in continuation region of " + name + ": " +
                             fmt(st.min_slope_continuation));
    if (st.max_slope_gap_intervention > tol.equality)
      rep.failures.push_back("slope differs from 1 in intervention region of " + name + ": " +
                             fmt(st.max_slope_gap_intervention));
    if (st.min_slope < -tol.monotone) rep.failures.push_back("value decreasing in " + name);

    // beyond the top barrier (L - rho) w is affine with slope -rho: its left end bounds it
    rep.tail_generator = std::max(rep.tail_generator, generator_residual(w, std::max(top, t), r, p, Side::Right));
  }
  if (rep.concavity > tol.inequality) rep.failures.push_back("w(., 2) not concave below b2: " + fmt(rep.concavity));
  if (rep.tail_generator > tol.inequality) rep.failures.push_back("generator positive beyond the top barrier");

  try {
    rep.conditions = conditions ? *conditions : policy_conditions(w, policy, p);
    rep.x0 = rep.conditions->x0;
    if (!rep.conditions->optimal) {
      std::string why = "optimality conditions fail";
      if (rep.conditions->g_at_x0) why += " (G/H at x0 = " + fmt(*rep.conditions->g_at_x0) + ")";
      for (const auto& n : rep.conditions->notes) why += "; " + n;
      rep.failures.push_back(why);
    }
  } catch (const Error& e) {
    rep.failures.push_back(e.what());
  }
  rep.passed = rep.failures.empty();
  return rep;
}

}  // namespace regdiv
