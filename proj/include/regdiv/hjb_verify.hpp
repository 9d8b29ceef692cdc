#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "regdiv/conditions.hpp"
#include "regdiv/model.hpp"
#include "regdiv/piecewise.hpp"

namespace regdiv {

struct Tolerances {
  double equality = 1e-9;
  double inequality = 1e-8;
  double monotone = 1e-10;
};

struct GridSpec {
  int points_per_regime = 4000;
  int cluster_points = 50;  // split evenly on both sides of every junction
  double cluster_width = 1e-4;
  double junction_offset = 1e-8;
  Tolerances tol;
};

struct JunctionResidual {
  Regime regime;
  double x;
  int smoothness;
  std::string label;
  std::array<double, 3> jumps{};  // value, first, second derivative; unused orders stay 0
  double max_jump = 0.0;
};

struct RegimeGridStats {
  std::size_t points = 0;
  double max_hjb = -std::numeric_limits<double>::infinity();
  double max_generator_intervention = -std::numeric_limits<double>::infinity();
  double max_abs_generator_continuation = 0.0;
  double max_slope_gap_intervention = 0.0;  // |w' - 1|
  double min_slope_continuation = std::numeric_limits<double>::infinity();
  double min_slope = std::numeric_limits<double>::infinity();
};

struct VerificationReport {
  std::vector<JunctionResidual> smooth_fit;
  double max_smooth_fit = 0.0;
  std::array<RegimeGridStats, 2> hjb_grid;
  double gradient_floor = std::numeric_limits<double>::infinity();  // min w' where w' >= 1 is required
  double concavity = 0.0;  // max positive w''(., 2) on (theta2, b2)
  double tail_generator = -std::numeric_limits<double>::infinity();
  double x_max = 0.0;
  std::optional<ConditionReport> conditions;
  std::optional<double> x0;
  std::vector<std::string> failures;
  bool passed = false;
};

double eval(const PiecewiseValue& w, double x, Regime r, int order = 0);

// (L - rho) w at x in regime r, using the segment on the given side.
double generator_residual(const PiecewiseValue& w, double x, Regime r, const ValidatedParams& p,
                          Side side = Side::Right);

// Optimality conditions attached to the policy's case, read off w.
ConditionReport policy_conditions(const PiecewiseValue& w, const Policy& policy, const ValidatedParams& p);

VerificationReport verify(const PiecewiseValue& w, const Policy& policy, const ValidatedParams& p,
                          const GridSpec& grid = {}, std::optional<ConditionReport> conditions = std::nullopt);

}  // namespace regdiv
