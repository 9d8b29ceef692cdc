#pragma once

#include <array>

#include "regdiv/conditions.hpp"
#include "regdiv/model.hpp"
#include "regdiv/piecewise.hpp"

namespace regdiv {

// Immediate liquidation is optimal iff mu2 <= this value.
double case_a_threshold(const ValidatedParams& p);
PiecewiseValue build_case_a(const ValidatedParams& p);

struct CaseBSolution {
  double b2 = 0.0;
  double C1 = 0.0, C2 = 0.0, K1 = 0.0;
  double alpha7 = 0.0, alpha8 = 0.0;
  std::array<double, 4> system_residuals{};
  PiecewiseValue value;
};

// Scalar equation whose root in (theta2, inf) is the single barrier b2.
double case_b_reduced_equation(double x, const ValidatedParams& p);
CaseBSolution solve_case_b(const ValidatedParams& p);
// Same ansatz with b2 imposed and the second-order fit dropped.
CaseBSolution build_case_b_candidate(const ValidatedParams& p, double b2);
// Residuals of the four-equation barrier system at a given solution.
std::array<double, 4> case_b_system_residuals(const ValidatedParams& p, const CaseBSolution& s);

// Q: mu2 <= Q is enough for the single barrier to be optimal.
double case_b_q_bound(const ValidatedParams& p);
ConditionReport check_case_b_optimal(const ValidatedParams& p, const CaseBSolution& s);
// Same checks read off any single-barrier value function.
ConditionReport case_b_conditions(const ValidatedParams& p, const PiecewiseValue& w, double b2);

// mu1 - (lambda1 + rho) w(x,1) + lambda1 w(x,2)
double condition_function(const PiecewiseValue& w, double x, const ValidatedParams& p);

}  // namespace regdiv
