#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "regdiv/case_ab.hpp"
#include "regdiv/case_cd.hpp"
#include "regdiv/hjb_verify.hpp"
#include "regdiv/model.hpp"
#include "regdiv/piecewise.hpp"

namespace regdiv {

struct CandidateAttempt {
  CaseTag case_tag;
  std::optional<Ordering> ordering;
  bool solved = false;
  bool verified = false;
  std::string failure;
  std::optional<Policy> policy;
  std::optional<VerificationReport> report;
};

struct Selection {
  ValidatedParams params;
  CaseTag case_tag;
  Policy policy;
  PiecewiseValue value;
  VerificationReport report;
  std::optional<CaseBSolution> case_b;
  std::optional<CaseCDSolution> case_cd;
  std::vector<CandidateAttempt> attempts;
  std::optional<CaseTag> tie_with;  // a later case that also verified at a boundary value
};

class NoVerifiedCaseError : public Error {
 public:
  explicit NoVerifiedCaseError(std::vector<CandidateAttempt> attempts);
  const std::vector<CandidateAttempt>& attempts() const { return attempts_; }

 private:
  std::vector<CandidateAttempt> attempts_;
};

struct SelectOptions {
  GridSpec grid;
  std::optional<std::array<double, 3>> seed_hint;  // d1, b1, b2 for the liquidation-barrier solves
  // a case within this distance of a boundary value is also tried for a tie report
  double tie_window = 1e-6;
};

Selection select_policy(const ValidatedParams& p, const SelectOptions& opts = {});

double value_at(const Selection& s, double x, Regime r);

struct Action {
  double payout = 0.0;
  std::optional<double> resulting_state;  // empty: bankrupt
  bool bankrupt() const { return !resulting_state.has_value(); }
};

// Per-regime thresholds of a policy: bankrupt at or below theta, liquidate at
// or below `liquidate`, pay the excess above `barrier`.
struct ActionRule {
  double theta;
  double liquidate;
  double barrier;
};

ActionRule action_rule(const Policy& policy, const ValidatedParams& p, Regime r);
Action immediate_action(const Policy& policy, const ValidatedParams& p, double x, Regime r);
Action immediate_action(const Selection& s, double x, Regime r);

// Value function of an arbitrary admissible policy of the two families, built
// from the case formulas with the boundaries imposed.
PiecewiseValue candidate_value(const Policy& policy, const ValidatedParams& p);

}  // namespace regdiv
