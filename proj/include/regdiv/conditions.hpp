#pragma once

#include <optional>
#include <string>
#include <vector>

namespace regdiv {

// Outcome of the sufficient-optimality checks attached to a case.
struct ConditionReport {
  double slope_at_theta2 = 0.0;   // w'(theta2+, 2)
  double slope_threshold = 0.0;   // (lambda1 + rho) / lambda1
  bool hypothesis = true;         // case-specific prerequisite on the slope at theta2
  bool slope_condition = false;   // w'(theta2+, 2) <= threshold
  std::optional<double> x0;       // where w'(., 2) crosses the threshold
  std::optional<double> g_at_x0;  // G or H at x0
  std::optional<double> h_slope_at_d1;
  bool h_slope_condition = false;
  std::optional<bool> q_shortcut;  // mu2 <= Q for the single-barrier case
  bool ordering_ok = true;
  bool c6_nonzero = true;
  bool optimal = false;
  std::vector<std::string> notes;
};

}  // namespace regdiv
