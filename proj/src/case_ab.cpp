#include "regdiv/case_ab.hpp"

#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "regdiv/roots.hpp"

namespace regdiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Constant term of the particular solution on the regime-2 span.
double p_constant(const ValidatedParams& p) {
  const double l2 = p.lambda(Regime::Two), r = p.rho();
  return p.mu(Regime::Two) * l2 / ((l2 + r) * (l2 + r)) +
         l2 * (p.theta(Regime::Two) - p.theta(Regime::One)) / (l2 + r);
}

// F scaled by exp(alpha7 * theta2); same root, no overflow for large theta2.
double scaled_f(double x, const ValidatedParams& p, double a7, double a8) {
  const double t2 = p.theta(Regime::Two), l2 = p.lambda(Regime::Two), r = p.rho();
  return a8 * a8 / (a7 * a7) * std::exp(a7 * (t2 - x)) - std::exp(a8 * (t2 - x)) -
         p_constant(p) * (r + l2) * a8 * (a7 - a8) / (a7 * r);
}

double scaled_f_slope(double x, const ValidatedParams& p, double a7, double a8) {
  const double t2 = p.theta(Regime::Two);
  return -a8 * a8 / a7 * std::exp(a7 * (t2 - x)) + a8 * std::exp(a8 * (t2 - x));
}

CaseBSolution assemble(const ValidatedParams& p, double b2, double a7c, double a8c, double a7, double a8) {
  const double t1 = p.theta(Regime::One), t2 = p.theta(Regime::Two);
  const double l2 = p.lambda(Regime::Two), r = p.rho();
  const double slope = l2 / (l2 + r);
  const double intercept = p.mu(Regime::Two) * l2 / ((l2 + r) * (l2 + r)) - slope * t1;

  CaseBSolution s;
  s.b2 = b2;
  s.alpha7 = a7;
  s.alpha8 = a8;
  s.C1 = a7c * std::exp(-a7 * b2);
  s.C2 = a8c * std::exp(-a8 * t2);
  s.K1 = a7c + a8c * std::exp(a8 * (b2 - t2)) + intercept + slope * b2 - b2;

  s.value = PiecewiseValue(t1, t2);
  s.value.set_segments(Regime::One, {Segment{t1, kInf, {}, -t1, 1.0, 0, "liquidation"}});
  s.value.set_segments(Regime::Two, {Segment{t2, b2, {{a7, a7c, b2}, {a8, a8c, t2}}, intercept, slope, 0, "theta2"},
                                     Segment{b2, kInf, {}, s.K1, 1.0, 2, "b2"}});
  s.system_residuals = case_b_system_residuals(p, s);
  return s;
}

}  // namespace

double case_a_threshold(const ValidatedParams& p) {
  return (p.theta(Regime::One) - p.theta(Regime::Two)) * p.lambda(Regime::Two);
}

PiecewiseValue build_case_a(const ValidatedParams& p) {
  if (p.mu(Regime::Two) > case_a_threshold(p))
    throw Error(ErrorCode::CaseNotApplicable, "mu2 exceeds the immediate-liquidation threshold");
  const double t1 = p.theta(Regime::One), t2 = p.theta(Regime::Two);
  PiecewiseValue w(t1, t2);
  w.set_segments(Regime::One, {Segment{t1, kInf, {}, -t1, 1.0, 0, "liquidation"}});
  w.set_segments(Regime::Two, {Segment{t2, kInf, {}, -t2, 1.0, 0, "liquidation"}});
  return w;
}

double case_b_reduced_equation(double x, const ValidatedParams& p) {
  const auto [a7, a8] = quadratic_roots(p, Regime::Two);
  const double t2 = p.theta(Regime::Two), l2 = p.lambda(Regime::Two), r = p.rho();
  return a8 * a8 / (a7 * a7) * std::exp(-a7 * x) - std::exp((a8 - a7) * t2 - a8 * x) -
         p_constant(p) / (r * a7) * ((r + l2) * (a7 * a8 - a8 * a8) * std::exp(-a7 * t2));
}

CaseBSolution solve_case_b(const ValidatedParams& p) {
  if (p.mu(Regime::Two) <= case_a_threshold(p))
    throw Error(ErrorCode::CaseNotApplicable, "mu2 does not exceed the immediate-liquidation threshold");
  const auto [a7, a8] = quadratic_roots(p, Regime::Two);
  const double t1 = p.theta(Regime::One), t2 = p.theta(Regime::Two);
  auto f = [&](double x) { return scaled_f(x, p, a7, a8); };

  const double lo = t2 + 1e-10;
  if (!(f(lo) > 0.0)) throw Error(ErrorCode::BracketFailure, "reduced equation not positive at theta2");
  double width = 10.0 * (t2 - t1 + 1.0);
  int doublings = 0;
  while (f(t2 + width) >= 0.0) {
    if (++doublings > 60) throw Error(ErrorCode::BracketFailure, "reduced equation has no sign change");
    width *= 2.0;
  }
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a)); };
  boost::uintmax_t iters = 300;
  auto [u, v] = boost::math::tools::bisect(f, lo, t2 + width, tol, iters);
  double b2 = 0.5 * (u + v);
  for (int i = 0; i < 3; ++i) {
    const double d = scaled_f_slope(b2, p, a7, a8);
    if (d == 0.0) break;
    const double next = b2 - f(b2) / d;
    if (!(next > u && next < v) || std::abs(f(next)) > std::abs(f(b2))) break;
    b2 = next;
  }

  const double l2 = p.lambda(Regime::Two), r = p.rho();
  const double c2 = a7 * r / ((r + l2) * a8 * (a7 - a8));  // C2 exp(alpha8 b2)
  const double a7c = -c2 * a8 * a8 / (a7 * a7);             // C1 exp(alpha7 b2)
  const double a8c = c2 * std::exp(a8 * (t2 - b2));         // C2 exp(alpha8 theta2)
  return assemble(p, b2, a7c, a8c, a7, a8);
}

CaseBSolution build_case_b_candidate(const ValidatedParams& p, double b2) {
  const double t2 = p.theta(Regime::Two);
  if (!(b2 > t2)) throw Error(ErrorCode::InvalidPolicy, "barrier b2 must exceed theta2");
  const auto [a7, a8] = quadratic_roots(p, Regime::Two);
  const double l2 = p.lambda(Regime::Two), r = p.rho();
  // w(theta2+) = 0 and w'(b2-) = 1 in the anchored unknowns
  const double m11 = std::exp(a7 * (t2 - b2)), m12 = 1.0, r1 = -p_constant(p);
  const double m21 = a7, m22 = a8 * std::exp(a8 * (b2 - t2)), r2 = r / (r + l2);
  const double det = m11 * m22 - m12 * m21;
  return assemble(p, b2, (r1 * m22 - m12 * r2) / det, (m11 * r2 - m21 * r1) / det, a7, a8);
}

std::array<double, 4> case_b_system_residuals(const ValidatedParams& p, const CaseBSolution& s) {
  const auto& w = s.value;
  return {w.eval_side(p.theta(Regime::Two), Regime::Two, 0, Side::Right),
          w.eval_side(s.b2, Regime::Two, 0, Side::Left) - (s.b2 + s.K1),
          w.eval_side(s.b2, Regime::Two, 1, Side::Left) - 1.0, w.eval_side(s.b2, Regime::Two, 2, Side::Left)};
}

double case_b_q_bound(const ValidatedParams& p) {
  const double l1 = p.lambda(Regime::One), l2 = p.lambda(Regime::Two), r = p.rho();
  const double gap = p.theta(Regime::Two) - p.theta(Regime::One);
  return (gap * ((l2 + r) * (l1 + r) - l1 * l2) - (l2 + r) * p.mu(Regime::One)) / l1;
}

double condition_function(const PiecewiseValue& w, double x, const ValidatedParams& p) {
  const double l1 = p.lambda(Regime::One);
  return p.mu(Regime::One) - (l1 + p.rho()) * w.eval(x, Regime::One) + l1 * w.eval(x, Regime::Two);
}

ConditionReport check_case_b_optimal(const ValidatedParams& p, const CaseBSolution& s) {
  return case_b_conditions(p, s.value, s.b2);
}

ConditionReport case_b_conditions(const ValidatedParams& p, const PiecewiseValue& w, double b2) {
  ConditionReport rep;
  const double t2 = p.theta(Regime::Two);
  rep.slope_at_theta2 = w.eval_side(t2, Regime::Two, 1, Side::Right);
  rep.slope_threshold = (p.lambda(Regime::One) + p.rho()) / p.lambda(Regime::One);
  rep.slope_condition = rep.slope_at_theta2 <= rep.slope_threshold;
  rep.q_shortcut = p.mu(Regime::Two) <= case_b_q_bound(p);
  if (rep.slope_condition) {
    rep.optimal = true;
    return rep;
  }
  auto g = [&](double x) { return w.eval(x, Regime::Two, 1) - rep.slope_threshold; };
  const double lo = t2 + 1e-12, hi = b2;
  if (!(g(lo) > 0.0 && g(hi) < 0.0))
    throw Error(ErrorCode::X0NotBracketed, "w'(.,2) does not cross the slope threshold on (theta2, b2)");
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-10; };
  boost::uintmax_t iters = 200;
  auto [u, v] = boost::math::tools::bisect(g, lo, hi, tol, iters);
  rep.x0 = 0.5 * (u + v);
  rep.g_at_x0 = condition_function(w, *rep.x0, p);
  rep.optimal = *rep.g_at_x0 <= 0.0;
  return rep;
}

}  // namespace regdiv
