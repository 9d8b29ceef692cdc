#pragma once

#include <array>
#include <optional>

#include "regdiv/conditions.hpp"
#include "regdiv/model.hpp"
#include "regdiv/piecewise.hpp"
#include "regdiv/roots.hpp"

namespace regdiv {

// Unknown vector layout: d1, b1, b2, C1..C8, K1, K2.
using Unknowns13 = std::array<double, 13>;
using Residuals13 = std::array<double, 13>;

struct CaseCDSolution {
  CaseTag case_tag = CaseTag::C;
  Ordering ordering = Ordering::C_b2_lt_b1;
  double d1 = 0.0, b1 = 0.0, b2 = 0.0;
  std::array<double, 8> C{};     // C1..C8
  std::array<double, 4> hatC{};  // coupled quartic coefficients in the other regime
  double K1 = 0.0, K2 = 0.0;
  // C1..C8, K1, K2 with every exponential anchored at its segment end
  std::array<double, 10> anchored{};
  Residuals13 residuals{};
  double residual_norm = 0.0;  // max |residual| / max(1, |w(b1,1)|)
  int iterations = 0;
  int start_index = -1;
  PiecewiseValue value;

  Unknowns13 unknowns() const;
  LiquidationBarrier policy() const { return {d1, b1, b2, ordering}; }
};

// The 13 smooth-fit equations. Outside the ordering cone each entry is
// inflated by 1e3 times the cone violation.
Residuals13 residuals(Ordering ordering, const Unknowns13& unknowns, const ValidatedParams& p);

struct SolveOptions {
  std::optional<std::array<double, 3>> seed_hint;  // d1, b1, b2
  int perturbed_starts = 8;
  int max_iterations = 100;
};

CaseCDSolution solve_case(Ordering ordering, const ValidatedParams& p, const SolveOptions& opts = {});

// Value function for fixed boundaries: the ten linear equations are solved,
// the three free-boundary equations are left to the verifier.
CaseCDSolution build_case_cd_candidate(Ordering ordering, double d1, double b1, double b2, const ValidatedParams& p);

// Newton on all 13 unknowns at once, started from `start`.
std::optional<CaseCDSolution> solve_full_system(Ordering ordering, const Unknowns13& start, const ValidatedParams& p,
                                                int max_iterations = 200);

ConditionReport check_case_c_conditions(const ValidatedParams& p, const CaseCDSolution& s);
ConditionReport check_case_d_conditions(const ValidatedParams& p, const CaseCDSolution& s);
// Conditions read off a value function; c6 is the anchored C6 coefficient.
ConditionReport case_cd_conditions(const ValidatedParams& p, const PiecewiseValue& w, const LiquidationBarrier& policy,
                                   double c6);

}  // namespace regdiv
