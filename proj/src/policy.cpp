#include "regdiv/policy.hpp"

#include <cmath>

namespace regdiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string describe(const std::vector<CandidateAttempt>& attempts) {
  std::string s = "no case verified";
  for (const auto& a : attempts) {
    s += "; " + std::string(to_string(a.case_tag));
    if (a.ordering) s += "/" + std::string(to_string(*a.ordering));
    s += ": " + a.failure;
  }
  return s;
}

std::string first_failure(const VerificationReport& r) { return r.failures.empty() ? "" : r.failures.front(); }

}  // namespace

NoVerifiedCaseError::NoVerifiedCaseError(std::vector<CandidateAttempt> attempts)
    : Error(ErrorCode::NoVerifiedCase, describe(attempts)), attempts_(std::move(attempts)) {}

Selection select_policy(const ValidatedParams& p, const SelectOptions& opts) {
  std::vector<CandidateAttempt> attempts;
  std::optional<Selection> found;

  auto accept = [&](CaseTag tag, Policy policy, PiecewiseValue value, VerificationReport report,
                    std::optional<CaseBSolution> b, std::optional<CaseCDSolution> cd) {
    if (found) {
      if (!found->tie_with) found->tie_with = tag;
      return;
    }
    found = Selection{p, tag, std::move(policy), std::move(value), std::move(report), std::move(b), std::move(cd), {}, {}};
  };
  // once a case verified, later ones are only probed near a case boundary
  const double mu2 = p.mu(Regime::Two);
  const double a_threshold = case_a_threshold(p);

  {
    CandidateAttempt at;
    at.case_tag = CaseTag::A;
    at.ordering = std::nullopt;
    if (mu2 <= a_threshold) {
      at.solved = true;
      auto w = build_case_a(p);
      auto rep = verify(w, LiquidateBoth{}, p, opts.grid);
      at.verified = rep.passed;
      at.failure = first_failure(rep);
      at.policy = LiquidateBoth{};
      at.report = rep;
      if (rep.passed) accept(CaseTag::A, LiquidateBoth{}, std::move(w), std::move(rep), std::nullopt, std::nullopt);
    } else {
      at.failure = "mu2 above the immediate-liquidation threshold";
    }
    attempts.push_back(std::move(at));
  }

  if (!found || std::abs(mu2 - a_threshold) <= opts.tie_window) {
    CandidateAttempt at;
    at.case_tag = CaseTag::B;
    at.ordering = std::nullopt;
    try {
      auto sol = solve_case_b(p);
      at.solved = true;
      const Policy pol = BarrierRegime2{sol.b2};
      std::optional<ConditionReport> cond;
      try {
        cond = check_case_b_optimal(p, sol);
      } catch (const Error&) {
      }
      auto rep = verify(sol.value, pol, p, opts.grid, cond);
      at.verified = rep.passed;
      at.failure = first_failure(rep);
      at.policy = pol;
      at.report = rep;
      if (rep.passed) accept(CaseTag::B, pol, sol.value, std::move(rep), sol, std::nullopt);
    } catch (const Error& e) {
      at.failure = e.what();
    }
    attempts.push_back(std::move(at));
  }

  for (Ordering o : {Ordering::C_b2_lt_b1, Ordering::C_b1_lt_b2, Ordering::D_b2_lt_b1, Ordering::D_b1_lt_b2}) {
    if (found) break;
    CandidateAttempt at;
    at.case_tag = case_of(o);
    at.ordering = o;
    try {
      SolveOptions so;
      so.seed_hint = opts.seed_hint;
      auto sol = solve_case(o, p, so);
      at.solved = true;
      const Policy pol = sol.policy();
      std::optional<ConditionReport> cond;
      try {
        cond = case_of(o) == CaseTag::C ? check_case_c_conditions(p, sol) : check_case_d_conditions(p, sol);
      } catch (const Error&) {
      }
      auto rep = verify(sol.value, pol, p, opts.grid, cond);
      at.verified = rep.passed;
      at.failure = first_failure(rep);
      at.policy = pol;
      at.report = rep;
      if (rep.passed) accept(case_of(o), pol, sol.value, std::move(rep), std::nullopt, sol);
    } catch (const Error& e) {
      at.failure = e.what();
    }
    attempts.push_back(std::move(at));
  }

  if (!found) throw NoVerifiedCaseError(std::move(attempts));
  found->attempts = std::move(attempts);
  return std::move(*found);
}

double value_at(const Selection& s, double x, Regime r) { return s.value.eval(x, r, 0); }

ActionRule action_rule(const Policy& policy, const ValidatedParams& p, Regime r) {
  const double t = p.theta(r);
  if (const auto* b = std::get_if<BarrierRegime2>(&policy))
    return r == Regime::Two ? ActionRule{t, t, b->b2} : ActionRule{t, kInf, kInf};
  if (const auto* lb = std::get_if<LiquidationBarrier>(&policy))
    return r == Regime::Two ? ActionRule{t, t, lb->b2} : ActionRule{t, lb->d1, lb->b1};
  return {t, kInf, kInf};
}

Action immediate_action(const Policy& policy, const ValidatedParams& p, double x, Regime r) {
  const ActionRule rule = action_rule(policy, p, r);
  if (x <= rule.theta) return {0.0, std::nullopt};
  if (x <= rule.liquidate) return {x - rule.theta, std::nullopt};
  if (x > rule.barrier) return {x - rule.barrier, rule.barrier};
  return {0.0, x};
}

Action immediate_action(const Selection& s, double x, Regime r) { return immediate_action(s.policy, s.params, x, r); }

PiecewiseValue candidate_value(const Policy& policy, const ValidatedParams& p) {
  check_policy(policy, p);
  if (const auto* b = std::get_if<BarrierRegime2>(&policy)) return build_case_b_candidate(p, b->b2).value;
  if (const auto* lb = std::get_if<LiquidationBarrier>(&policy))
    return build_case_cd_candidate(lb->ordering, lb->d1, lb->b1, lb->b2, p).value;
  const double t1 = p.theta(Regime::One), t2 = p.theta(Regime::Two);
  PiecewiseValue w(t1, t2);
  w.set_segments(Regime::One, {Segment{t1, kInf, {}, -t1, 1.0, 0, "liquidation"}});
  w.set_segments(Regime::Two, {Segment{t2, kInf, {}, -t2, 1.0, 0, "liquidation"}});
  return w;
}

}  // namespace regdiv
